#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace specnet {

enum class Errc {
  parse,             // malformed input file
  invalid_argument,  // bad configuration or call contract violation
  assumption,        // one of the spectral assumptions does not hold
  numeric,           // solver failure not attributable to an assumption
  integration,       // ODE step-size underflow / blow-up
  io,                // file system failure
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) { throw Error(code, msg); }

/// Directed edge src -> dst; its weight lives at adjacency(dst, src).
struct Edge {
  int src = 0;
  int dst = 0;

  friend bool operator==(const Edge& a, const Edge& b) = default;
  friend auto operator<=>(const Edge& a, const Edge& b) {
    return std::tie(a.src, a.dst) <=> std::tie(b.src, b.dst);
  }
};

using EdgeList = std::vector<Edge>;

struct WeightedEdge {
  int src = 0;
  int dst = 0;
  double weight = 0.0;
};

}  // namespace specnet
