#include "sectorize/chromosome.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

namespace sectorize {

Chromosome canonicalized(const Chromosome& c) {
  Chromosome out;
  out.labels.resize(c.labels.size());
  std::unordered_map<int, int> next;
  int fresh = 0;
  for (std::size_t i = 0; i < c.labels.size(); ++i) {
    auto [it, inserted] = next.emplace(c.labels[i], fresh);
    if (inserted) ++fresh;
    out.labels[i] = it->second;
  }
  return out;
}

bool is_canonical(const Chromosome& c) {
  int fresh = 0;
  for (int label : c.labels) {
    if (label > fresh) return false;
    if (label == fresh) ++fresh;
    if (label < 0) return false;
  }
  return true;
}

int cluster_count(const Chromosome& c) {
  int mx = -1;
  for (int label : c.labels) mx = std::max(mx, label);
  return mx + 1;
}

std::vector<std::vector<Index>> clusters_of(const Chromosome& c) {
  if (!is_canonical(c))
    throw std::invalid_argument("chromosome: clusters_of needs canonical labels");
  std::vector<std::vector<Index>> out(
      static_cast<std::size_t>(cluster_count(c)));
  for (std::size_t i = 0; i < c.labels.size(); ++i)
    out[static_cast<std::size_t>(c.labels[i])].push_back(
        static_cast<Index>(i));
  return out;
}

Chromosome singleton_chromosome(Index n) {
  Chromosome c;
  c.labels.resize(static_cast<std::size_t>(n));
  std::iota(c.labels.begin(), c.labels.end(), 0);
  return c;
}

}  // namespace sectorize
