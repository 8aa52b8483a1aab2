#pragma once

// Smooth closed planar curves with analytic parameter derivatives up to
// fourth order, local frames, curvature data, and composite Gauss-Legendre
// panelizations used by the Nystrom discretization.

#include <array>
#include <cmath>
#include <cstddef>
#include <memory>
#include <vector>

namespace flexbie {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2() = default;
  constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double a) const { return {a * x, a * y}; }
  Vec2 operator-() const { return {-x, -y}; }
  Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
};

inline Vec2 operator*(double a, const Vec2& v) { return {a * v.x, a * v.y}; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }
inline double norm2(const Vec2& a) { return a.x * a.x + a.y * a.y; }

// Point on a curve with unit tangent, outward unit normal (curve oriented
// counterclockwise), and curvature plus its first two arclength derivatives.
// Sign convention: kappa = +1/R on a counterclockwise circle of radius R.
struct CurvePoint {
  double t = 0.0;  // parameter in [0, 2*pi)
  Vec2 pos;
  Vec2 tau;  // unit tangent, direction of increasing t
  Vec2 nrm;  // outward unit normal, nrm = (tau.y, -tau.x)
  double speed = 0.0;  // |dgamma/dt|
  double kappa = 0.0;
  double kappa_s = 0.0;   // d(kappa)/ds
  double kappa_ss = 0.0;  // d^2(kappa)/ds^2
};

// Smooth closed curve, parameterized by t in [0, 2*pi), counterclockwise.
class Curve {
 public:
  virtual ~Curve() = default;

  // d[j] = j-th derivative of gamma with respect to t, j = 0..4.
  virtual void derivatives(double t, std::array<Vec2, 5>& d) const = 0;

  Vec2 position(double t) const {
    std::array<Vec2, 5> d;
    derivatives(t, d);
    return d[0];
  }

  // gamma(t1) - gamma(t2). The base implementation differences positions,
  // which loses absolute accuracy ~eps as t1 -> t2; subclasses override
  // with closed forms (sum-to-product identities) that keep full relative
  // accuracy at any separation. Kernel evaluation between nearby points on
  // the same curve depends on that accuracy.
  virtual Vec2 chord(double t1, double t2) const {
    return position(t1) - position(t2);
  }

  // Full frame; requires derivatives up to fourth order for kappa_ss.
  CurvePoint at(double t) const;
};

class Circle final : public Curve {
 public:
  Circle(Vec2 center, double radius) : c_(center), r_(radius) {}
  void derivatives(double t, std::array<Vec2, 5>& d) const override;
  Vec2 chord(double t1, double t2) const override;

 private:
  Vec2 c_;
  double r_;
};

// (2 cos t, sin t - 0.4 cos^2 t): smooth, convex, aspect ratio 2:1.
class Droplet final : public Curve {
 public:
  void derivatives(double t, std::array<Vec2, 5>& d) const override;
  Vec2 chord(double t1, double t2) const override;
};

// (1 + amp * cos(arms * t)) * (cos t, sin t): non-convex for amp large enough.
class Starfish final : public Curve {
 public:
  Starfish(int arms, double amp) : arms_(arms), amp_(amp) {}
  void derivatives(double t, std::array<Vec2, 5>& d) const override;
  Vec2 chord(double t1, double t2) const override;

 private:
  int arms_;
  double amp_;
};

// scale * R(angle) * gamma(t) + shift. Orientation preserved (scale > 0).
class TransformedCurve final : public Curve {
 public:
  TransformedCurve(std::shared_ptr<const Curve> base, double scale,
                   double angle, Vec2 shift)
      : base_(std::move(base)),
        shift_(shift),
        m00_(scale * std::cos(angle)),
        m01_(-scale * std::sin(angle)),
        m10_(scale * std::sin(angle)),
        m11_(scale * std::cos(angle)) {}
  void derivatives(double t, std::array<Vec2, 5>& d) const override;
  Vec2 chord(double t1, double t2) const override;

 private:
  std::shared_ptr<const Curve> base_;
  Vec2 shift_;
  double m00_, m01_, m10_, m11_;
};

// One Gauss-Legendre panel of a panelization.
struct Panel {
  int component = 0;
  double t0 = 0.0, t1 = 0.0;  // parameter interval
  int first_node = 0;         // index into the node arrays
  double arc_len = 0.0;
  double s0 = 0.0;  // arclength at t0, measured within the component
};

// Composite discretization of one or more closed curves. Nodes are the
// mapped Gauss-Legendre points; node weights include the Jacobian, so
// integral f ds ~ sum_j weight[j] * f(node j).
class Panelization {
 public:
  Panelization(std::vector<std::shared_ptr<const Curve>> curves,
               int panels_per_curve, int order);

  int order() const { return order_; }
  int num_components() const { return static_cast<int>(curves_.size()); }
  int num_panels() const { return static_cast<int>(panels_.size()); }
  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int panels_per_curve() const { return panels_per_curve_; }

  const Curve& curve(int component) const { return *curves_[component]; }
  const Panel& panel(int p) const { return panels_[p]; }
  const CurvePoint& node(int j) const { return nodes_[j]; }
  double weight(int j) const { return weights_[j]; }
  double node_ref(int j) const { return ref_[j % order_]; }
  int node_panel(int j) const { return j / order_; }
  int node_component(int j) const { return panels_[j / order_].component; }

  // Arclength of node j measured within its component.
  double node_arclen(int j) const { return node_s_[j]; }
  double component_length(int component) const { return lengths_[component]; }
  double total_length() const;

  // First panel / node index of a component, and one-past-the-end.
  int panel_begin(int component) const { return component * panels_per_curve_; }
  int panel_end(int component) const { return (component + 1) * panels_per_curve_; }
  int node_begin(int component) const { return panel_begin(component) * order_; }
  int node_end(int component) const { return panel_end(component) * order_; }

  // Parameter t of the point at arclength s within a component
  // (s taken modulo the component length). Spectrally accurate.
  double param_at_arclen(int component, double s) const;

  // Nearest point on a component to x: Newton refinement of the nodal
  // minimizer. Returns the frame at the nearest parameter.
  CurvePoint nearest_point(int component, const Vec2& x) const;

  // Signed side of x: +1 outside all components, -1 inside one.
  // Robust near the boundary (uses nearest-point projection there).
  int side_of(const Vec2& x) const;

  // Distance from x to the nearest node of any component (cheap bound).
  double min_node_distance(const Vec2& x) const;

 private:
  std::vector<std::shared_ptr<const Curve>> curves_;
  int panels_per_curve_;
  int order_;
  std::vector<double> ref_;      // reference GL nodes on [-1,1]
  std::vector<double> ref_w_;    // reference GL weights
  std::vector<Panel> panels_;
  std::vector<CurvePoint> nodes_;
  std::vector<double> weights_;
  std::vector<double> node_s_;
  std::vector<double> lengths_;
  // Legendre coefficients, per panel, of the arclength offset s(xi) - s0
  // and of the speed factor |dgamma/dxi| on the reference interval.
  std::vector<std::vector<double>> arc_coef_;
  std::vector<std::vector<double>> spd_coef_;
};

}  // namespace flexbie
