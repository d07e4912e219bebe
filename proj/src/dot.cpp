#include "threadreach/dot.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace threadreach {

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
}

}  // namespace

std::string arg_to_dot(const ReachedSet& reached, const CfaSet& cfa) {
  // Node labels: threading part plus data part when present. Canonical
  // order: nodes sorted by label.
  std::vector<std::string> labels(reached.nodes.size());
  for (size_t i = 0; i < reached.nodes.size(); ++i) {
    const CompositeState& s = reached.nodes[i].state;
    std::string label = threading_state_label(s.threading, cfa);
    std::string data = data_state_label(s.data);
    if (!data.empty()) label += "\\n" + data;
    labels[i] = label;
  }
  std::vector<size_t> order(reached.nodes.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return labels[a] != labels[b] ? labels[a] < labels[b] : a < b;
  });
  std::vector<size_t> rank(reached.nodes.size());
  for (size_t r = 0; r < order.size(); ++r) rank[order[r]] = r;

  std::ostringstream out;
  out << "digraph ARG {\n  node [shape=box, fontname=\"monospace\"];\n";
  for (size_t r = 0; r < order.size(); ++r)
    out << "  n" << r << " [label=\"" << escape(labels[order[r]]) << "\"];\n";

  struct Line {
    size_t from, to;
    std::string label;
  };
  std::vector<Line> lines;
  lines.reserve(reached.arg_edges.size());
  for (const ArgEdge& e : reached.arg_edges) {
    lines.push_back(Line{rank[static_cast<size_t>(e.parent)], rank[static_cast<size_t>(e.child)],
                         e.thread.display() + ": " + op_text(cfa.edge(e.edge).op)});
  }
  std::sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) {
    if (a.from != b.from) return a.from < b.from;
    if (a.to != b.to) return a.to < b.to;
    return a.label < b.label;
  });
  for (const Line& l : lines)
    out << "  n" << l.from << " -> n" << l.to << " [label=\"" << escape(l.label) << "\"];\n";
  out << "}\n";
  return out.str();
}

void export_arg_dot(const ReachedSet& reached, const CfaSet& cfa, const std::string& out_path) {
  write_file(out_path, arg_to_dot(reached, cfa));
}

std::string cfa_to_dot(const CfaSet& cfa) {
  std::ostringstream out;
  out << "digraph CFA {\n  node [shape=circle, fontname=\"monospace\"];\n";
  int cluster = 0;
  for (const auto& [name, fn] : cfa.functions) {
    out << "  subgraph cluster_" << cluster++ << " {\n    label=\"" << escape(name) << "\";\n";
    std::vector<LocId> locs;
    for (EdgeId eid : fn.edges) {
      locs.push_back(cfa.edge(eid).from);
      locs.push_back(cfa.edge(eid).to);
    }
    locs.push_back(fn.entry);
    locs.push_back(fn.exit);
    std::sort(locs.begin(), locs.end());
    locs.erase(std::unique(locs.begin(), locs.end()), locs.end());
    for (LocId l : locs) {
      out << "    l" << l << " [label=\"" << escape(cfa.loc_name(l)) << "\"";
      if (cfa.loc(l).is_error) out << ", shape=doublecircle, color=red";
      else if (cfa.loc(l).is_function_exit) out << ", shape=doublecircle";
      out << "];\n";
    }
    for (EdgeId eid : fn.edges) {
      const CfaEdge& e = cfa.edge(eid);
      out << "    l" << e.from << " -> l" << e.to << " [label=\"" << escape(op_text(e.op));
      if (e.scope == EdgeScope::ThreadLocal) out << " (local)";
      out << "\"];\n";
    }
    out << "  }\n";
  }
  out << "}\n";
  return out.str();
}

void export_cfa_dot(const CfaSet& cfa, const std::string& out_path) {
  write_file(out_path, cfa_to_dot(cfa));
}

}  // namespace threadreach
