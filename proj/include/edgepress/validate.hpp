// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The edgepress Authors

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "edgepress/graph.hpp"

namespace edgepress {

using ShapeMap = std::map<std::string, Shape>;

struct Issue {
  std::string node;  // empty for graph-level issues
  std::string message;

  bool operator==(const Issue&) const = default;
};

struct ValidationReport {
  std::vector<Issue> issues;
  std::vector<std::string> topo_order;
  ShapeMap shapes;

  bool ok() const { return issues.empty(); }
  std::string summary() const;
};

class ShapeError : public GraphError {
 public:
  ShapeError(std::string node, const std::string& message);
  const std::string& node() const { return node_; }

 private:
  std::string node_;
};

/// Deterministic topological order: Kahn's algorithm taking the
/// lexicographically smallest ready node id first. Empty when cyclic.
std::optional<std::vector<std::string>> topological_order(const ModelGraph& g);

/// Output shapes of one node given the shapes of its inputs and weights.
std::vector<Shape> infer_node(const Node& node, const ShapeMap& known);

/// Shapes of every tensor. Throws ShapeError on the first inconsistent node
/// and GraphError when the graph has no topological order.
ShapeMap infer_shapes(const ModelGraph& g);

/// Copy of `g` whose tensor specs carry freshly inferred shapes.
ModelGraph with_inferred_shapes(const ModelGraph& g);

/// Never throws; every problem becomes an issue entry.
ValidationReport validate(const ModelGraph& g);

}  // namespace edgepress
