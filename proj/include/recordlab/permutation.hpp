#pragma once

// Permutation diagrams, record classification and the internal
// insertion/deletion calculus.
//
// All public interfaces are 1-based: column i holds the point (i, p(i)) and a
// Cell (i, j) addresses column i, row j of the diagram.

#include <algorithm>
#include <charconv>
#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "recordlab/exact.hpp"

namespace recordlab {

class Permutation {
 public:
  Permutation() = default;

  explicit Permutation(std::vector<int> values) : values_(std::move(values)) {
    std::vector<char> seen(values_.size() + 1, 0);
    for (int v : values_) {
      if (v < 1 || v > static_cast<int>(values_.size()) || seen[v])
        throw std::invalid_argument("not a permutation of 1..n");
      seen[v] = 1;
    }
  }

  Permutation(std::initializer_list<int> values) : Permutation(std::vector<int>(values)) {}

  static Permutation identity(int n) {
    std::vector<int> v(n);
    std::iota(v.begin(), v.end(), 1);
    return Permutation(std::move(v), Unchecked{});
  }

  /// Parses space-separated one-line notation ("3 5 2 1 4"). A single token of
  /// digits with no spaces is read digit by digit ("35214"), which is only
  /// meaningful for sizes below 10.
  static Permutation parse(std::string_view text) {
    std::vector<int> out;
    const bool compact = text.find_first_of(" ,\t") == std::string_view::npos;
    std::size_t pos = 0;
    while (pos < text.size()) {
      while (pos < text.size() && (text[pos] == ' ' || text[pos] == ',' || text[pos] == '\t')) ++pos;
      if (pos >= text.size()) break;
      if (compact) {
        if (text[pos] < '0' || text[pos] > '9') throw std::invalid_argument("bad permutation text");
        out.push_back(text[pos] - '0');
        ++pos;
        continue;
      }
      int v = 0;
      auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + text.size(), v);
      if (ec != std::errc{}) throw std::invalid_argument("bad permutation text");
      out.push_back(v);
      pos = static_cast<std::size_t>(ptr - text.data());
    }
    return Permutation(std::move(out));
  }

  int size() const { return static_cast<int>(values_.size()); }
  bool empty() const { return values_.empty(); }

  /// Value at column i (1-based).
  int operator()(int i) const { return values_[static_cast<std::size_t>(i - 1)]; }

  std::span<const int> values() const { return values_; }

  Permutation inverse() const {
    std::vector<int> inv(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) inv[values_[i] - 1] = static_cast<int>(i + 1);
    return Permutation(std::move(inv), Unchecked{});
  }

  /// Column holding the given value.
  int position_of(int value) const {
    auto it = std::find(values_.begin(), values_.end(), value);
    return static_cast<int>(it - values_.begin()) + 1;
  }

  /// Canonical text form: space-separated one-line notation.
  std::string str() const {
    std::string s;
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (i) s += ' ';
      s += std::to_string(values_[i]);
    }
    return s;
  }

  friend bool operator==(const Permutation&, const Permutation&) = default;
  friend auto operator<=>(const Permutation&, const Permutation&) = default;

 private:
  struct Unchecked {};
  Permutation(std::vector<int> values, Unchecked) : values_(std::move(values)) {}

  friend Permutation make_unchecked(std::vector<int> values);

  std::vector<int> values_;
};

/// Builds a permutation from values already known to be a bijection on 1..n.
inline Permutation make_unchecked(std::vector<int> values) {
  return Permutation(std::move(values), Permutation::Unchecked{});
}

inline std::ostream& operator<<(std::ostream& os, const Permutation& p) { return os << '[' << p.str() << ']'; }

struct Cell {
  int i = 0;  // column
  int j = 0;  // row
  friend bool operator==(const Cell&, const Cell&) = default;
  friend auto operator<=>(const Cell&, const Cell&) = default;
  friend std::ostream& operator<<(std::ostream& os, const Cell& c) { return os << '(' << c.i << ',' << c.j << ')'; }
};

struct InsertionSequence {
  std::vector<Cell> cells;
  int base_size = 0;

  /// The l-th cell (1-based) must lie in [base_size + l]^2.
  bool valid() const {
    for (std::size_t l = 0; l < cells.size(); ++l) {
      const int bound = base_size + static_cast<int>(l) + 1;
      if (cells[l].i < 1 || cells[l].j < 1 || cells[l].i > bound || cells[l].j > bound) return false;
    }
    return true;
  }
};

// ---------------------------------------------------------------------------
// Records

struct RecordFlags {
  bool ltr_max = false;
  bool ltr_min = false;
  bool rtl_max = false;
  bool rtl_min = false;

  bool external() const { return ltr_max || ltr_min || rtl_max || rtl_min; }
  bool internal() const { return !external(); }
};

class RecordClass {
 public:
  explicit RecordClass(std::vector<RecordFlags> flags) : flags_(std::move(flags)) {}

  int size() const { return static_cast<int>(flags_.size()); }
  const RecordFlags& operator()(int i) const { return flags_[static_cast<std::size_t>(i - 1)]; }
  std::span<const RecordFlags> flags() const { return flags_; }

  int internal_count() const {
    return static_cast<int>(std::count_if(flags_.begin(), flags_.end(),
                                          [](const RecordFlags& f) { return f.internal(); }));
  }

 private:
  std::vector<RecordFlags> flags_;
};

inline RecordClass classify(const Permutation& p) {
  const auto v = p.values();
  const std::size_t n = v.size();
  std::vector<RecordFlags> flags(n);
  int hi = std::numeric_limits<int>::min(), lo = std::numeric_limits<int>::max();
  for (std::size_t i = 0; i < n; ++i) {
    if (v[i] > hi) { flags[i].ltr_max = true; hi = v[i]; }
    if (v[i] < lo) { flags[i].ltr_min = true; lo = v[i]; }
  }
  hi = std::numeric_limits<int>::min();
  lo = std::numeric_limits<int>::max();
  for (std::size_t r = n; r-- > 0;) {
    if (v[r] > hi) { flags[r].rtl_max = true; hi = v[r]; }
    if (v[r] < lo) { flags[r].rtl_min = true; lo = v[r]; }
  }
  return RecordClass(std::move(flags));
}

/// Number of internal points, computed without materialising the flags.
inline int internal_count(std::span<const int> v) {
  const std::size_t n = v.size();
  if (n < 3) return 0;
  // A point is internal iff it is strictly inside the prefix range and the
  // suffix range of its neighbours on both sides.
  std::vector<int> suf_min(n), suf_max(n);
  suf_min[n - 1] = suf_max[n - 1] = v[n - 1];
  for (std::size_t r = n - 1; r-- > 0;) {
    suf_min[r] = std::min(suf_min[r + 1], v[r]);
    suf_max[r] = std::max(suf_max[r + 1], v[r]);
  }
  int count = 0;
  int lo = v[0], hi = v[0];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const int x = v[i];
    if (x > lo && x < hi && x > suf_min[i + 1] && x < suf_max[i + 1]) ++count;
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  return count;
}

inline int internal_count(const Permutation& p) { return internal_count(p.values()); }

inline bool is_square(const Permutation& p) { return internal_count(p) == 0; }

/// Pattern of a subsequence of values: re-ranks them to 1..m.
inline Permutation standardize(std::span<const int> values) {
  std::vector<int> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return values[a] < values[b]; });
  std::vector<int> out(values.size());
  for (std::size_t r = 0; r < order.size(); ++r) out[order[r]] = static_cast<int>(r + 1);
  return make_unchecked(std::move(out));
}

/// The square permutation induced by the external points.
inline Permutation exterior(const Permutation& p) {
  const RecordClass rc = classify(p);
  std::vector<int> kept;
  kept.reserve(p.values().size());
  for (int i = 1; i <= p.size(); ++i)
    if (rc(i).external()) kept.push_back(p(i));
  return standardize(kept);
}

// ---------------------------------------------------------------------------
// Insertion and deletion

/// Adds a point at (i, j), shifting columns >= i right and rows >= j up.
inline Permutation insert(const Permutation& p, Cell c) {
  const int n = p.size();
  if (c.i < 1 || c.i > n + 1 || c.j < 1 || c.j > n + 1)
    throw std::out_of_range("insertion cell outside [n+1]^2");
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(n) + 1);
  const auto v = p.values();
  for (int col = 1; col <= n + 1; ++col) {
    if (col == c.i) {
      out.push_back(c.j);
      continue;
    }
    const int src = v[static_cast<std::size_t>(col < c.i ? col - 1 : col - 2)];
    out.push_back(src >= c.j ? src + 1 : src);
  }
  return make_unchecked(std::move(out));
}

/// Removes the point (i, j); it must be a point of the diagram.
inline Permutation remove(const Permutation& p, Cell c) {
  const int n = p.size();
  if (c.i < 1 || c.i > n || p(c.i) != c.j) throw std::invalid_argument("invalid deletion: point not in diagram");
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(n) - 1);
  for (int col = 1; col <= n; ++col) {
    if (col == c.i) continue;
    const int v = p(col);
    out.push_back(v > c.j ? v - 1 : v);
  }
  return make_unchecked(std::move(out));
}

/// Alias matching the calculus vocabulary; `delete` is a keyword.
inline Permutation delete_point(const Permutation& p, Cell c) { return remove(p, c); }

inline Permutation apply_sequence(Permutation p, const InsertionSequence& seq) {
  if (seq.base_size != p.size()) throw std::invalid_argument("insertion sequence base size mismatch");
  for (std::size_t l = 0; l < seq.cells.size(); ++l) {
    const Cell c = seq.cells[l];
    if (c.i < 1 || c.j < 1 || c.i > p.size() + 1 || c.j > p.size() + 1)
      throw std::out_of_range("invalid cell at step " + std::to_string(l + 1));
    p = insert(p, c);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Internal insertions

/// Per-column description of I(p): for column i the internal rows are
/// lo+1 .. hi (empty when hi <= lo).
struct InternalColumns {
  std::vector<int> lo;  // index i-1 for column i
  std::vector<int> hi;

  std::int64_t width(int i) const {
    const auto d = static_cast<std::int64_t>(hi[static_cast<std::size_t>(i - 1)]) - lo[static_cast<std::size_t>(i - 1)];
    return d > 0 ? d : 0;
  }

  std::int64_t count() const {
    std::int64_t total = 0;
    for (std::size_t c = 0; c < lo.size(); ++c) total += std::max(0, hi[c] - lo[c]);
    return total;
  }
};

/// Quadrant characterization: (i, j) is internal iff the original points split
/// into columns < i and >= i each contain a value >= j and a value < j.
inline InternalColumns internal_columns(std::span<const int> v) {
  const int n = static_cast<int>(v.size());
  InternalColumns cols;
  cols.lo.assign(static_cast<std::size_t>(n) + 1, 0);
  cols.hi.assign(static_cast<std::size_t>(n) + 1, 0);
  if (n < 2) return cols;
  std::vector<int> suf_min(static_cast<std::size_t>(n) + 1), suf_max(static_cast<std::size_t>(n) + 1);
  suf_min[n] = std::numeric_limits<int>::max();
  suf_max[n] = std::numeric_limits<int>::min();
  for (int r = n - 1; r >= 0; --r) {
    suf_min[r] = std::min(suf_min[r + 1], v[r]);
    suf_max[r] = std::max(suf_max[r + 1], v[r]);
  }
  int pre_min = std::numeric_limits<int>::max(), pre_max = std::numeric_limits<int>::min();
  // Column i (1-based) has left block v[0..i-2] and right block v[i-1..n-1].
  for (int i = 1; i <= n + 1; ++i) {
    if (i >= 2) {
      pre_min = std::min(pre_min, v[i - 2]);
      pre_max = std::max(pre_max, v[i - 2]);
    }
    if (i == 1 || i == n + 1) continue;
    cols.lo[i - 1] = std::max(pre_min, suf_min[i - 1]);
    cols.hi[i - 1] = std::min(pre_max, suf_max[i - 1]);
  }
  return cols;
}

inline InternalColumns internal_columns(const Permutation& p) { return internal_columns(p.values()); }

inline std::int64_t internal_cell_count(const Permutation& p) { return internal_columns(p).count(); }

/// I(p): every cell whose insertion creates an internal point.
inline std::vector<Cell> internal_cells(const Permutation& p) {
  const InternalColumns cols = internal_columns(p);
  std::vector<Cell> out;
  for (int i = 1; i <= p.size() + 1; ++i)
    for (int j = cols.lo[i - 1] + 1; j <= cols.hi[i - 1]; ++j) out.push_back({i, j});
  return out;
}

/// Definitional oracle: insert then classify.
inline bool is_internal_insertion(const Permutation& p, Cell c) {
  return classify(insert(p, c))(c.i).internal();
}

namespace detail {

inline void count_sequences(const Permutation& p, int k, ExactCount& total) {
  if (k == 1) {
    total += internal_cell_count(p);
    return;
  }
  for (const Cell& c : internal_cells(p)) count_sequences(insert(p, c), k - 1, total);
}

template <class F>
void visit_sequences(const Permutation& p, int k, std::vector<Cell>& prefix, F& f) {
  if (k == 0) {
    f(static_cast<const std::vector<Cell>&>(prefix), p);
    return;
  }
  for (const Cell& c : internal_cells(p)) {
    prefix.push_back(c);
    visit_sequences(insert(p, c), k - 1, prefix, f);
    prefix.pop_back();
  }
}

}  // namespace detail

/// |J(p, k)|: number of internal insertion sequences of length k.
inline ExactCount count_internal_sequences(const Permutation& p, int k) {
  if (k < 0) throw std::invalid_argument("k must be nonnegative");
  if (k == 0) return 1;
  ExactCount total = 0;
  detail::count_sequences(p, k, total);
  return total;
}

/// Calls f(cells, result) for every internal insertion sequence of length k.
template <class F>
void for_each_internal_sequence(const Permutation& p, int k, F&& f) {
  std::vector<Cell> prefix;
  detail::visit_sequences(p, k, prefix, f);
}

/// ASq(p, k): distinct permutations reachable from the square p by internal
/// sequences of length k.
inline std::set<Permutation> asq_from(const Permutation& p, int k) {
  if (!is_square(p)) throw std::invalid_argument("asq_from requires a square permutation");
  if (k < 0) throw std::invalid_argument("k must be nonnegative");
  std::set<Permutation> out;
  for_each_internal_sequence(p, k, [&](const std::vector<Cell>&, const Permutation& q) { out.insert(q); });
  return out;
}

/// Number of orders in which the marked points can be deleted one at a time,
/// each deletion addressing the current coordinates of a marked point.
inline ExactCount deletion_orders(const Permutation& p, std::vector<Cell> marked) {
  for (const Cell& c : marked)
    if (c.i < 1 || c.i > p.size() || p(c.i) != c.j) throw std::invalid_argument("marked point absent from diagram");
  std::sort(marked.begin(), marked.end());
  if (std::adjacent_find(marked.begin(), marked.end()) != marked.end())
    throw std::invalid_argument("marked points must be distinct");
  std::vector<int> order(marked.size());
  std::iota(order.begin(), order.end(), 0);
  ExactCount valid = 0;
  do {
    Permutation cur = p;
    std::vector<Cell> pts = marked;
    bool ok = true;
    for (int idx : order) {
      const Cell c = pts[idx];
      if (c.i < 1 || c.i > cur.size() || cur(c.i) != c.j) {
        ok = false;
        break;
      }
      cur = remove(cur, c);
      for (Cell& q : pts) {
        if (q.i > c.i) --q.i;
        if (q.j > c.j) --q.j;
      }
    }
    if (ok) ++valid;
  } while (std::next_permutation(order.begin(), order.end()));
  return valid;
}

// ---------------------------------------------------------------------------
// Exhaustive iteration

/// Calls f(values) for every permutation of size n in lexicographic order.
template <class F>
void for_each_permutation(int n, F&& f) {
  std::vector<int> v(static_cast<std::size_t>(n));
  std::iota(v.begin(), v.end(), 1);
  do {
    f(std::span<const int>(v));
  } while (std::next_permutation(v.begin(), v.end()));
}

}  // namespace recordlab
