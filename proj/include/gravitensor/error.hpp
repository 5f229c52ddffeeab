#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace gravitensor {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid lattice construction or mismatched grids.
class GridError : public Error {
 public:
  using Error::Error;
};

/// Index-variance misuse: same-variance contraction, wrong metric variance, bad slot.
class IndexError : public Error {
 public:
  using Error::Error;
};

/// A metric that is degenerate or has lost Lorentz signature at some lattice point.
class GeometryError : public Error {
 public:
  GeometryError(const std::string& what, std::size_t point, std::array<int, 4> location)
      : Error(what + " at point " + std::to_string(point) + " (" + std::to_string(location[0]) + "," +
              std::to_string(location[1]) + "," + std::to_string(location[2]) + "," +
              std::to_string(location[3]) + ")"),
        point_(point),
        location_(location) {}

  std::size_t point() const noexcept { return point_; }
  std::array<int, 4> location() const noexcept { return location_; }

 private:
  std::size_t point_;
  std::array<int, 4> location_;
};

/// A non-finite intermediate value.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace gravitensor
