#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

#include "fuchsian/hyperbolic.hpp"

namespace fuchsian {

// Group words: letter 'a'+k is generator k, 'A'+k its inverse.
using Word = std::string;

Word reduce_word(const Word& w);
Word invert_word(const Word& w);
/// Length first, then lexicographic.
bool shortlex_less(const Word& a, const Word& b);

/// Boundary side j of the canonical 4g-gon, walked counter-clockwise:
/// b_1, b_2, b̄_1, b̄_2, b_3, b_4, b̄_3, b̄_4, ...
struct Side {
  int pair;   // k in [0, 2g)
  bool bar;   // true for b̄_k
};
std::vector<Side> canonical_side_pattern(int genus);

/// Index of the side carrying b_k (bar = false) or b̄_k (bar = true).
int side_index(int genus, int k, bool bar);

inline int zvc_dimension(int genus) { return 6 * genus - 6; }

/// A normal canonical polygon.  theta[k] is the interior angle at the start
/// vertex of b_k, theta_bar[k] the one at the start vertex of b̄_k.
struct ZVCPolygon {
  int genus = 0;
  std::vector<double> lengths;    // b_1 .. b_{2g}
  std::vector<double> theta;      // size 2g
  std::vector<double> theta_bar;  // size 2g
  std::vector<MinkowskiPoint> vertices;  // start vertex of each side
  std::vector<Mat3> pairings;  // SO(2,1) map of b_k onto b̄_k, per k
  double closure_residual = 0.0;

  /// (b_3..b_{2g}, θ_3, θ̄_3, ..., θ_{2g}, θ̄_{2g})
  std::vector<double> coords() const;
  double angle_sum() const;
  /// Interior angle at each vertex in walk order.
  std::vector<double> walk_angles() const;
  std::vector<double> walk_lengths() const;
};

/// Recovers b_1, b_2, θ_1 (and θ̄_1, θ_2, θ̄_2) from the closure conditions
/// and lays the polygon out with its vertex centroid at x_c and its first
/// vertex on the +x1 ray.  Throws ChartViolation.
ZVCPolygon build_polygon(int genus, const std::vector<double>& coords);

/// A convex point of the chart, solved once per genus and cached.
const std::vector<double>& zvc_fixture(int genus);

/// Walks a polygon from side lengths and interior angles (walk order) and
/// returns the final frame; identity iff the polygon closes.
Mat3 walk_polygon(const std::vector<double>& lengths,
                  const std::vector<double>& angles,
                  std::vector<MinkowskiPoint>* vertices = nullptr);

/// Cocompact Fuchsian group of H^2, extended to H^3.
class FuchsianGroup {
public:
  /// Side-pairing group of a convex polygon with the canonical pattern.
  static FuchsianGroup from_polygon_vertices(int genus,
                                             std::vector<MinkowskiPoint> vertices);
  /// Same, with the SO(2,1) pairing matrices already known.
  static FuchsianGroup from_pairings(int genus, std::vector<MinkowskiPoint> vertices,
                                     const std::vector<Mat3>& pairings);

  int genus() const { return genus_; }
  const std::vector<Isometry>& generators() const { return generators_; }
  const Isometry& generator(int k) const { return generators_[k]; }
  /// Isometry for a single letter.
  const Isometry& letter(char c) const;
  Isometry element(const Word& w) const;

  const std::vector<MinkowskiPoint>& polygon() const { return polygon_; }
  double relation_residual() const { return relation_residual_; }
  /// The vertex-cycle relator, applied right to left.
  const Word& relator() const { return relator_; }
  /// Sum of the interior angles in the vertex cycle of vertex 0.
  double cycle_angle() const { return cycle_angle_; }

  /// Area of the fundamental polygon (sum of fan triangle areas).
  double polygon_area() const;
  /// A point in the polygon interior (Minkowski centroid of its vertices).
  MinkowskiPoint interior_point() const;
  /// True if the plane point lies strictly inside the fundamental polygon.
  bool contains(const MinkowskiPoint& p, double margin = 0.0) const;

private:
  int genus_ = 0;
  std::vector<Isometry> generators_;
  std::vector<Isometry> inverses_;
  std::vector<MinkowskiPoint> polygon_;
  double relation_residual_ = 0.0;
  double cycle_angle_ = 0.0;
  Word relator_;
};

/// Side pairings of the regular 4g-gon with all angles 2π/4g, centered at x_c.
FuchsianGroup regular_group(int genus);

/// Throws PairingFailure when a generator misses the paired endpoints by
/// more than 1e-6.
FuchsianGroup group_from_polygon(const ZVCPolygon& p);

/// Block extension of an SO(2,1) matrix on (x1, x2, x4).  Throws NotAnIsometry.
Isometry extend_to_h3(const Mat3& h2_isometry);

/// Group elements found by breadth-first search over generator letters,
/// deduplicated by the image of an interior reference point.  Each element
/// keeps the first word found for it, which is a shortest word.
class ElementCatalog {
public:
  struct Entry {
    Word word;
    Isometry g;
    Vec4 image;
    int level;
  };

  explicit ElementCatalog(FuchsianGroup group,
                          std::size_t max_elements = 400000);

  /// Extends the search to word length L.  Throws TruncationUnstable when the
  /// element budget would be exceeded.
  void ensure_level(int L);
  int level() const { return level_; }

  const std::vector<Entry>& entries() const { return entries_; }
  /// Index range [begin, end) of elements with shortest word length <= L.
  std::size_t count_up_to(int L) const;

  /// Canonical word of an element given by its matrix; inserts the element
  /// under the freely reduced fallback word when not yet known.
  Word canonical(const Mat4& m, const Word& fallback);
  Word canonical(const Word& w) { return canonical(group_.element(w).matrix(), w); }
  /// Index into entries() of the element moving the reference point to
  /// `image`, or -1.
  long find(const Vec4& image) const;

  const FuchsianGroup& group() const { return group_; }
  const MinkowskiPoint& reference() const { return reference_; }

private:
  using Key = long long;
  using Grid = std::unordered_multimap<Key, std::size_t>;
  static void cell_of(const Vec4& image, long cell[3]);
  static Key cell_key(long ix, long iy, long iz);
  static long search(const Grid& grid, const std::vector<Entry>& list,
                     const Vec4& image);
  static void insert(Grid& grid, std::vector<Entry>& list, Entry e);

  FuchsianGroup group_;
  MinkowskiPoint reference_;
  std::size_t max_elements_;
  std::vector<Entry> entries_;
  std::vector<std::size_t> level_end_;
  Grid grid_;
  // Elements met outside the breadth-first ball, keyed by fallback words.
  std::vector<Entry> extras_;
  Grid extras_grid_;
  int level_ = -1;
};

struct OrbitPoint {
  MinkowskiPoint point;
  int seed;
  Word word;
};

struct OrbitPointSet {
  std::vector<OrbitPoint> points;
  std::vector<MinkowskiPoint> seeds;
  int max_word_length = 0;
};

/// Images of the seeds under all group elements of word length <= L,
/// deduplicated at distance 1e-9.
OrbitPointSet enumerate_orbit(const FuchsianGroup& group,
                              const std::vector<MinkowskiPoint>& seeds, int L);

} // namespace fuchsian
