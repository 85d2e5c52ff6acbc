#include "kgtopos/line_digraph.hpp"

#include <algorithm>
#include <sstream>

#include "kgtopos/error.hpp"

namespace kgtopos {

std::size_t Digraph::edge_count() const {
  std::size_t n = 0;
  for (const auto& a : adjacency) n += a.size();
  return n;
}

bool Digraph::has_edge(std::size_t u, std::size_t v) const {
  const auto& a = adjacency.at(u);
  return std::binary_search(a.begin(), a.end(), v);
}

std::vector<std::size_t> Digraph::in_degrees() const {
  std::vector<std::size_t> d(vertex_count(), 0);
  for (const auto& a : adjacency)
    for (auto v : a) ++d[v];
  return d;
}

Partition Partition::canonical() const {
  Partition p{blocks};
  for (auto& b : p.blocks) std::sort(b.begin(), b.end());
  std::sort(p.blocks.begin(), p.blocks.end());
  return p;
}

bool Partition::is_partition_of(std::size_t n) const {
  std::vector<int> seen(n, 0);
  for (const auto& b : blocks) {
    if (b.empty()) return false;
    for (auto v : b) {
      if (v >= n || seen[v]++) return false;
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; });
}

bool same_partition(const Partition& a, const Partition& b) {
  return a.canonical().blocks == b.canonical().blocks;
}

namespace {

Digraph shared_endpoint_digraph(const KnowledgeGraph& kg, bool heads) {
  const std::size_t m = kg.triple_count();
  std::vector<std::vector<std::size_t>> fibre(kg.entity_count());
  for (std::size_t j = 0; j < m; ++j) {
    const auto& t = kg.triple(j);
    fibre[heads ? t.head : t.tail].push_back(j);
  }
  Digraph g;
  g.adjacency.resize(m);
  for (const auto& f : fibre)
    for (auto i : f)
      for (auto j : f)
        if (i != j) g.adjacency[i].push_back(j);
  for (auto& a : g.adjacency) std::sort(a.begin(), a.end());
  return g;
}

Partition fibre_partition(const KnowledgeGraph& kg, bool heads) {
  std::vector<std::vector<std::size_t>> fibre(kg.entity_count());
  for (std::size_t j = 0; j < kg.triple_count(); ++j) {
    const auto& t = kg.triple(j);
    fibre[heads ? t.head : t.tail].push_back(j);
  }
  Partition p;
  for (auto& f : fibre)
    if (!f.empty()) p.blocks.push_back(std::move(f));
  return p;
}

}  // namespace

Digraph build_out_line(const KnowledgeGraph& kg) { return shared_endpoint_digraph(kg, true); }
Digraph build_in_line(const KnowledgeGraph& kg) { return shared_endpoint_digraph(kg, false); }

Partition head_partition(const KnowledgeGraph& kg) { return fibre_partition(kg, true); }
Partition tail_partition(const KnowledgeGraph& kg) { return fibre_partition(kg, false); }

Partition scc(const Digraph& g) {
  const std::size_t n = g.vertex_count();
  constexpr std::size_t unvisited = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, unvisited), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::size_t counter = 0;
  Partition out;

  struct Frame {
    std::size_t v;
    std::size_t next;
  };
  std::vector<Frame> call;
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != unvisited) continue;
    call.push_back({root, 0});
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      auto& fr = call.back();
      const auto& adj = g.adjacency[fr.v];
      if (fr.next < adj.size()) {
        std::size_t w = adj[fr.next++];
        if (index[w] == unvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[fr.v] = std::min(low[fr.v], index[w]);
        }
        continue;
      }
      const std::size_t v = fr.v;
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      if (low[v] == index[v]) {
        std::vector<std::size_t> block;
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          block.push_back(w);
        } while (w != v);
        std::sort(block.begin(), block.end());
        out.blocks.push_back(std::move(block));
      }
    }
  }
  return out;
}

SccTheoremReport verify_scc_theorem(const KnowledgeGraph& kg) {
  SccTheoremReport r;
  auto check = [&](const Digraph& g, const Partition& fibres, const char* side) {
    if (!same_partition(scc(g), fibres)) {
      r.ok = false;
      r.failures.push_back(std::string(side) + ": strongly connected components differ from the fibres");
    }
    const auto in = g.in_degrees();
    for (const auto& block : fibres.blocks) {
      for (auto v : block) {
        const std::size_t want = block.size() - 1;
        if (g.adjacency[v].size() != want || in[v] != want) {
          r.ok = false;
          r.failures.push_back(std::string(side) + ": vertex t" + std::to_string(v + 1) +
                               " has degree (" + std::to_string(g.adjacency[v].size()) + "," +
                               std::to_string(in[v]) + "), expected " + std::to_string(want));
        }
      }
    }
  };
  check(build_out_line(kg), head_partition(kg), "out-line");
  check(build_in_line(kg), tail_partition(kg), "in-line");
  return r;
}

LineMap induced_line_map(const KgHomomorphism& f) {
  const auto hc = check_hom(f);
  if (!hc.ok)
    throw DomainError("not a homomorphism: triple t" + std::to_string(hc.violations.front() + 1) +
                      " has no image");
  LineMap lm;
  const auto& src = *f.source;
  for (const auto& t : src.triples()) {
    // Target triples form a set, so the image triple is unique.
    auto j = f.target->triple_index(f.image(t));
    if (!j) throw AmbiguityError("triple image is not well defined");
    lm.vertex_map.push_back(*j);
  }
  auto check = [&](const Digraph& a, const Digraph& b, const char* side) {
    for (std::size_t u = 0; u < a.vertex_count(); ++u)
      for (auto v : a.adjacency[u]) {
        const auto fu = lm.vertex_map[u], fv = lm.vertex_map[v];
        if (fu != fv && !b.has_edge(fu, fv)) {
          lm.ok = false;
          lm.failures.push_back(std::string(side) + ": edge t" + std::to_string(u + 1) + "->t" +
                                std::to_string(v + 1) + " has no image");
        }
      }
  };
  check(build_out_line(src), build_out_line(*f.target), "out-line");
  check(build_in_line(src), build_in_line(*f.target), "in-line");
  return lm;
}

std::vector<std::size_t> compose_maps(const std::vector<std::size_t>& second,
                                      const std::vector<std::size_t>& first) {
  std::vector<std::size_t> out;
  out.reserve(first.size());
  for (auto v : first) out.push_back(second.at(v));
  return out;
}

std::string to_dot(const Digraph& g, const KnowledgeGraph& kg, const std::string& name) {
  auto escape = [](const std::string& s) {
    std::string o;
    for (char c : s) {
      if (c == '"' || c == '\\') o += '\\';
      o += c;
    }
    return o;
  };
  std::ostringstream os;
  os << "digraph " << name << " {\n";
  for (std::size_t v = 0; v < g.vertex_count(); ++v)
    os << "  t" << v + 1 << " [label=\"" << escape(kg.triple_label(v)) << "\"];\n";
  for (std::size_t u = 0; u < g.vertex_count(); ++u)
    for (auto v : g.adjacency[u]) os << "  t" << u + 1 << " -> t" << v + 1 << ";\n";
  os << "}\n";
  return os.str();
}

}  // namespace kgtopos
