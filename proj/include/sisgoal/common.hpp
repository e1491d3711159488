#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace sisgoal {

using Index = Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Input data violates a documented precondition (bad file, single treatment
// level, constant column, ...). Maps to CLI exit status 1.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Every candidate fit failed to converge. Maps to CLI exit status 2.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Kernels that have an OpenMP path keep a serial path with identical results.
enum class Execution { serial, parallel };

// Coefficients with |value| above this count as selected.
inline constexpr double kSelectionTolerance = 1e-8;

// Probabilities are clipped to [kDefaultClip, 1 - kDefaultClip].
inline constexpr double kDefaultClip = 1e-6;

// Worker count used by OpenMP regions. Initialized from SISGOAL_THREADS
// when set, otherwise the OpenMP default.
int worker_count();
void set_worker_count(int workers);

// splitmix64 finalizer over (master, index); stream `index` of a run seeded
// with `master`. Independent of scheduling.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace sisgoal
