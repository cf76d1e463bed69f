#pragma once

#include <cstdint>
#include <random>

#include "gaussot/symmat.hpp"

namespace gaussot {

// Standard normal stream: mt19937_64 uniforms fed to the Marsaglia polar
// method. Unlike std::normal_distribution the output is identical across
// standard library implementations.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

  double next();
  Vector vector(Index n);
  Matrix matrix(Index rows, Index cols);

  // Uniform on [0, 1) with 53 random bits.
  double uniform();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Haar-distributed orthogonal matrix from the QR factorization of a Gaussian
// matrix with the R diagonal made positive.
Matrix random_orthogonal(Index dim, NormalStream& normals);

}  // namespace gaussot
