#pragma once

#include <stdexcept>
#include <string>

namespace hjm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Z_a(x, omega) is empty at some sampled point: the level is below min_p H there.
class EmptySublevel : public Error {
 public:
  EmptySublevel(double level, double pointwise_min)
      : Error("empty sublevel: level " + std::to_string(level) + " below pointwise minimum " +
              std::to_string(pointwise_min)),
        level_(level),
        pointwise_min_(pointwise_min) {}
  double level() const { return level_; }
  double pointwise_min() const { return pointwise_min_; }

 private:
  double level_;
  double pointwise_min_;
};

/// A cycle of negative sigma_a-length exists, so the level is below c_f(omega)
/// at this discretization.
class NegativeCycle : public Error {
 public:
  explicit NegativeCycle(double level)
      : Error("negative cycle at level " + std::to_string(level)), level_(level) {}
  double level() const { return level_; }

 private:
  double level_;
};

class CflViolation : public Error {
 public:
  using Error::Error;
};

class BoundaryMax : public Error {
 public:
  using Error::Error;
};

class EmptyEffectiveSublevel : public Error {
 public:
  using Error::Error;
};

class EmptySource : public Error {
 public:
  using Error::Error;
};

class EmptyAubry : public Error {
 public:
  using Error::Error;
};

class EmptySample : public Error {
 public:
  using Error::Error;
};

/// g(x) - g(y) > d(y, x) for a pair of source nodes.
class TraceViolation : public Error {
 public:
  TraceViolation(int from, int to, double excess)
      : Error("trace is not 1-Lipschitz for the metric: g(" + std::to_string(to) + ") - g(" +
              std::to_string(from) + ") exceeds d by " + std::to_string(excess)),
        from_(from),
        to_(to),
        excess_(excess) {}
  int from() const { return from_; }
  int to() const { return to_; }
  double excess() const { return excess_; }

 private:
  int from_;
  int to_;
  double excess_;
};

}  // namespace hjm
