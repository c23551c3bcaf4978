#include "sliced/explore.hpp"

#include <algorithm>
#include <bit>
#include <exception>
#include <memory>
#include <unordered_set>

#include "sliced/error.hpp"

namespace sliced {

std::string_view to_string(Backend b) { return b == Backend::Serial ? "serial" : "openmp"; }

std::optional<Backend> backend_from_string(std::string_view text) {
  if (text == "serial") return Backend::Serial;
  if (text == "openmp" || text == "parallel") return Backend::OpenMP;
  return std::nullopt;
}

StateCodec::StateCodec(std::vector<std::vector<long>> domains) : domains_(std::move(domains)) {
  std::size_t word = 0;
  unsigned used = 0;
  for (const auto& d : domains_) {
    if (d.empty()) throw Error(ErrorKind::EmptyDomain, "state slot with an empty domain");
    unsigned w = d.size() <= 1 ? 0u : static_cast<unsigned>(std::bit_width(d.size() - 1));
    if (used + w > 64) {
      ++word;
      used = 0;
    }
    width_.push_back(w);
    word_.push_back(word);
    shift_.push_back(used);
    used += w;
  }
  words_ = word + 1;
}

void StateCodec::encode(const std::vector<long>& values, std::uint64_t* out) const {
  std::fill(out, out + words_, 0);
  for (std::size_t i = 0; i < domains_.size(); ++i) {
    const auto& d = domains_[i];
    auto it = std::lower_bound(d.begin(), d.end(), values[i]);
    if (it == d.end() || *it != values[i]) {
      throw Error(ErrorKind::DomainViolation,
                  "value " + std::to_string(values[i]) + " outside slot " + std::to_string(i));
    }
    out[word_[i]] |= static_cast<std::uint64_t>(it - d.begin()) << shift_[i];
  }
}

std::vector<long> StateCodec::decode(const std::uint64_t* in) const {
  std::vector<long> out(domains_.size());
  for (std::size_t i = 0; i < domains_.size(); ++i) {
    std::uint64_t mask = width_[i] == 64 ? ~0ULL : ((1ULL << width_[i]) - 1);
    out[i] = domains_[i][(in[word_[i]] >> shift_[i]) & mask];
  }
  return out;
}

std::vector<long> BfsResult::state(std::size_t index) const {
  return codec->decode(storage.data() + index * codec->words());
}

std::vector<std::size_t> BfsResult::path_to(std::size_t index) const {
  std::vector<std::size_t> path;
  for (std::int64_t at = static_cast<std::int64_t>(index); at >= 0; at = parent[static_cast<std::size_t>(at)]) {
    path.push_back(static_cast<std::size_t>(at));
  }
  std::reverse(path.begin(), path.end());
  return path;
}

namespace {

struct Table {
  const std::vector<std::uint64_t>* storage;
  std::size_t words;

  std::size_t operator()(std::size_t i) const {
    const std::uint64_t* p = storage->data() + i * words;
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (std::size_t k = 0; k < words; ++k) {
      h ^= p[k] + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
  bool operator()(std::size_t a, std::size_t b) const {
    return std::equal(storage->data() + a * words, storage->data() + (a + 1) * words,
                      storage->data() + b * words);
  }
};

}  // namespace

BfsResult bfs(const SearchSpace& space, const std::function<bool(const std::vector<long>&)>& goal,
              const BfsOptions& options) {
  BfsResult r;
  auto codec = std::make_shared<StateCodec>(space.domains);
  r.codec = codec;
  const std::size_t W = codec->words();
  Table table{&r.storage, W};
  std::unordered_set<std::size_t, Table, Table> seen(1024, table, table);

  // Appends a candidate; returns its index and whether it is new.
  auto insert = [&](const std::vector<long>& s, std::int64_t parent,
                    std::uint32_t depth) -> std::pair<std::size_t, bool> {
    std::size_t idx = r.parent.size();
    r.storage.resize((idx + 1) * W);
    codec->encode(s, r.storage.data() + idx * W);
    auto [it, inserted] = seen.insert(idx);
    if (!inserted) {
      r.storage.resize(idx * W);
      return {*it, false};
    }
    r.parent.push_back(parent);
    r.depth.push_back(depth);
    if (options.record_edges) r.edges.emplace_back();
    return {idx, true};
  };

  std::vector<std::size_t> frontier;
  for (const auto& s : space.initial) {
    auto [idx, fresh] = insert(s, -1, 0);
    if (!fresh) continue;
    frontier.push_back(idx);
    if (goal && goal(s)) {
      r.stop = BfsResult::Stop::Goal;
      r.goal = idx;
      r.stats.states = r.size();
      r.stats.frontier_peak = frontier.size();
      return r;
    }
    if (r.size() > options.cap) {
      r.stop = BfsResult::Stop::Cap;
      r.stats.states = r.size();
      return r;
    }
  }

  std::uint32_t level = 0;
  while (!frontier.empty()) {
    r.stats.frontier_peak = std::max(r.stats.frontier_peak, frontier.size());
    r.stats.depth = level;
    std::vector<std::vector<std::vector<long>>> next(frontier.size());
    std::vector<std::vector<long>> sources(frontier.size());
    for (std::size_t i = 0; i < frontier.size(); ++i) sources[i] = r.state(frontier[i]);

    if (options.backend == Backend::OpenMP) {
      std::exception_ptr failure;
      const long n = static_cast<long>(frontier.size());
#pragma omp parallel for schedule(dynamic, 16)
      for (long i = 0; i < n; ++i) {
        try {
          space.successors(sources[static_cast<std::size_t>(i)], next[static_cast<std::size_t>(i)]);
        } catch (...) {
#pragma omp critical(sliced_bfs_failure)
          if (!failure) failure = std::current_exception();
        }
      }
      if (failure) std::rethrow_exception(failure);
    } else {
      for (std::size_t i = 0; i < frontier.size(); ++i) space.successors(sources[i], next[i]);
    }

    std::vector<std::size_t> upcoming;
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      for (const auto& s : next[i]) {
        ++r.stats.transitions;
        auto [idx, fresh] = insert(s, static_cast<std::int64_t>(frontier[i]), level + 1);
        if (options.record_edges) r.edges[frontier[i]].push_back(idx);
        if (!fresh) continue;
        upcoming.push_back(idx);
        if (goal && goal(s)) {
          r.stop = BfsResult::Stop::Goal;
          r.goal = idx;
          r.stats.states = r.size();
          r.stats.depth = level + 1;
          return r;
        }
        if (r.size() > options.cap) {
          r.stop = BfsResult::Stop::Cap;
          r.stats.states = r.size();
          r.stats.depth = level + 1;
          return r;
        }
      }
    }
    if (options.record_edges) {
      for (std::size_t i : frontier) {
        auto& e = r.edges[i];
        std::sort(e.begin(), e.end());
        e.erase(std::unique(e.begin(), e.end()), e.end());
      }
    }
    frontier = std::move(upcoming);
    if (!frontier.empty()) ++level;
  }
  r.stats.depth = level;
  r.stats.states = r.size();
  return r;
}

}  // namespace sliced
