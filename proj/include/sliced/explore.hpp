#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

namespace sliced {

enum class Backend { Serial, OpenMP };

std::string_view to_string(Backend b);
std::optional<Backend> backend_from_string(std::string_view text);

// Packs a vector of domain values into fixed-width words, each slot taking
// the minimal bit width of its domain.
class StateCodec {
 public:
  explicit StateCodec(std::vector<std::vector<long>> domains);

  std::size_t words() const { return words_; }
  std::size_t slots() const { return domains_.size(); }
  void encode(const std::vector<long>& values, std::uint64_t* out) const;
  std::vector<long> decode(const std::uint64_t* in) const;

 private:
  std::vector<std::vector<long>> domains_;
  std::vector<unsigned> width_;
  std::vector<std::size_t> word_;
  std::vector<unsigned> shift_;
  std::size_t words_ = 1;
};

// Abstract search space explored by bfs(). `successors` must be safe to call
// concurrently.
struct SearchSpace {
  std::vector<std::vector<long>> domains;  // sorted, per slot
  std::vector<std::vector<long>> initial;
  std::function<void(const std::vector<long>&, std::vector<std::vector<long>>&)> successors;
};

struct BfsOptions {
  std::size_t cap = 50'000'000;
  Backend backend = Backend::Serial;
  bool record_edges = false;
};

struct BfsStats {
  std::size_t states = 0;
  std::size_t transitions = 0;
  std::size_t frontier_peak = 0;
  std::size_t depth = 0;
};

struct BfsResult {
  enum class Stop { Exhausted, Goal, Cap };
  Stop stop = Stop::Exhausted;
  std::optional<std::size_t> goal;
  std::vector<std::int64_t> parent;  // -1 for initial states
  std::vector<std::uint32_t> depth;
  std::vector<std::vector<std::size_t>> edges;  // only with record_edges
  BfsStats stats;

  std::vector<long> state(std::size_t index) const;
  std::size_t size() const { return parent.size(); }
  // Indices from an initial state to `index`, inclusive.
  std::vector<std::size_t> path_to(std::size_t index) const;

  std::shared_ptr<const StateCodec> codec;
  std::vector<std::uint64_t> storage;
};

// Level-synchronous breadth-first search. Discovery order, parents and the
// reported goal are identical for both backends: successors of a level are
// computed (possibly in parallel) into per-state buffers and merged serially
// in frontier order. With a goal predicate the search stops at the first goal
// state discovered, which is therefore at minimal depth.
BfsResult bfs(const SearchSpace& space, const std::function<bool(const std::vector<long>&)>& goal,
              const BfsOptions& options);

}  // namespace sliced
