#pragma once

// Runtime values of the MDL interpreter: scalars, vectors and row-major matrices.

#include <boost/container/small_vector.hpp>

namespace cogmod::mdl::detail {

struct Value {
  int rank = 0;  // 0 scalar, 1 vector, 2 matrix
  int rows = 1;
  int cols = 1;
  boost::container::small_vector<double, 8> data{0.0};

  static Value scalar(double x) {
    Value v;
    v.data[0] = x;
    return v;
  }

  static Value vector(int n, double fill) {
    Value v;
    v.rank = 1;
    v.rows = 1;
    v.cols = n;
    v.data.assign(static_cast<std::size_t>(n), fill);
    return v;
  }

  static Value matrix(int r, int c, double fill) {
    Value v;
    v.rank = 2;
    v.rows = r;
    v.cols = c;
    v.data.assign(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), fill);
    return v;
  }

  std::size_t size() const noexcept { return data.size(); }
  double as_scalar() const noexcept { return data[0]; }
  bool same_shape(const Value& o) const noexcept { return rank == o.rank && rows == o.rows && cols == o.cols; }
};

}  // namespace cogmod::mdl::detail
