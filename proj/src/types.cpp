#include "cooflab/types.hpp"

#include <algorithm>

namespace cooflab {

SymbolGrid SymbolGrid::slice_rows(std::size_t first, std::size_t count) const {
  if (first + count > rows_) throw std::out_of_range("SymbolGrid::slice_rows: range exceeds grid");
  SymbolGrid out(count, cols_);
  std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(first * cols_), count * cols_, out.data_.begin());
  return out;
}

}  // namespace cooflab
