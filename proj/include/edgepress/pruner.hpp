// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The edgepress Authors

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "edgepress/graph.hpp"

namespace edgepress {

enum class SlotRole { ConvOut, ConvIn, Bias, ConcatSegment, AddOperand, SplitSegment };

std::string to_string(SlotRole r);

/// One place a group's channels live. Channel c of the group is channel
/// `offset + c` of the slot. ConcatSegment offsets are in the concat output,
/// SplitSegment offsets in the split input.
struct Slot {
  std::string node;
  SlotRole role = SlotRole::ConvOut;
  std::string tensor;
  std::int64_t offset = 0;

  bool operator==(const Slot&) const = default;
};

/// Channel slice of a feature-map tensor covered by a group.
struct TensorRange {
  std::string tensor;
  std::int64_t offset = 0;

  bool operator==(const TensorRange&) const = default;
};

struct DependencyGroup {
  std::vector<Slot> slots;
  std::vector<TensorRange> tensors;
  std::int64_t width = 0;
  bool excluded = false;
  std::string exclusion_reason;

  bool has_role(SlotRole r) const;
};

/// Which groups must never be pruned. Groups touching graph inputs or outputs
/// are always excluded since pruning them would change the model interface.
struct ExclusionPolicy {
  /// Groups whose channels feed a Concat directly.
  bool exclude_concat = true;
  /// Groups touching a node carrying any of these tags.
  std::vector<std::string> tags{"head"};
  /// Groups touching any of these node ids.
  std::vector<std::string> nodes;
};

/// Dependency groups of `g`, in a deterministic order (by first conv output
/// slot in topological order). Throws GraphError("unsupported topology ...")
/// when a channel dimension reaches an op with no propagation rule.
std::vector<DependencyGroup> build_dependency_groups(const ModelGraph& g, const ExclusionPolicy& policy = {});

enum class PruneScope { Local, Global };
enum class GlobalNormalization { Raw, MeanNormalized };
enum class PruneTarget { Parameters, Channels };

struct ImportanceScore {
  std::size_t group = 0;
  std::int64_t channel = 0;
  /// L2 norm of every weight (kernel rows, kernel columns, bias) the channel owns.
  double score = 0.0;
  /// score / mean score of the group; equals score under Raw normalization.
  double normalized = 0.0;
};

std::vector<ImportanceScore> score_channels(const ModelGraph& g, const std::vector<DependencyGroup>& groups,
                                            PruneScope scope = PruneScope::Local,
                                            GlobalNormalization norm = GlobalNormalization::MeanNormalized);

struct PruningSchedule {
  double r_target = 0.7;
  int k = 6;
  PruneScope scope = PruneScope::Local;
  GlobalNormalization normalization = GlobalNormalization::MeanNormalized;
  PruneTarget target = PruneTarget::Parameters;
  ExclusionPolicy exclusions;
  double stop_threshold = 0.20;

  /// 1 - (1 - r_target)^(1/k). Throws std::invalid_argument when r_target is
  /// outside (0, 1) or k < 1.
  double per_step() const;
  void check() const;
};

/// Group index to group-local channel indices to remove.
using PruneSet = std::map<std::size_t, std::set<std::int64_t>>;

std::size_t prune_count(const PruneSet& s);

/// Lowest-ranked channels at channel fraction `fraction`. Local scope takes
/// floor(fraction * width) per eligible group; global scope takes
/// floor(fraction * total eligible width) across groups by normalized score.
/// Ties go to the lower group index, then the lower channel index. Every group
/// keeps at least one channel; excluded groups are never selected.
PruneSet plan_fraction(const std::vector<DependencyGroup>& groups, const std::vector<ImportanceScore>& scores,
                       PruneScope scope, double fraction);

/// One schedule step at the schedule's per-step fraction.
PruneSet plan_step(const std::vector<DependencyGroup>& groups, const std::vector<ImportanceScore>& scores,
                   const PruningSchedule& schedule, int step_index);

/// Physically removes the selected channels from every slot of each group and
/// re-infers shapes. Throws GraphError on an inconsistent prune set.
ModelGraph apply_prune(const ModelGraph& g, const std::vector<DependencyGroup>& groups, const PruneSet& prune);

using RecoveryHook = std::function<ModelGraph(const ModelGraph&, int step)>;
using EvalFn = std::function<double(const ModelGraph&)>;

RecoveryHook identity_recovery();

struct StepMetrics {
  int step = 0;
  std::size_t pruned_channels = 0;
  std::int64_t params = 0;
  std::int64_t macs = 0;
  double metric = 0.0;
};

struct ScheduleResult {
  /// graphs[0] is the input graph; graphs[i] follows step i.
  std::vector<ModelGraph> graphs;
  std::vector<StepMetrics> metrics;
  bool stopped_early = false;
};

/// Score, plan, apply, recover, evaluate; up to k times. Stops after a step
/// whose metric falls below (1 - stop_threshold) * baseline. Under the
/// Parameters target each step picks the channel fraction whose result lands
/// closest to original_params * (1 - per_step)^(step + 1).
ScheduleResult run_schedule(const ModelGraph& g, const PruningSchedule& schedule, const EvalFn& eval,
                            const RecoveryHook& hook = identity_recovery());

std::string to_string(PruneScope s);
PruneScope parse_scope(const std::string& s);
std::string to_string(PruneTarget t);
PruneTarget parse_target(const std::string& s);
std::string to_string(GlobalNormalization n);
GlobalNormalization parse_normalization(const std::string& s);

}  // namespace edgepress
