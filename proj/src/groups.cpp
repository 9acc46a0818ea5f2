#include "udseq/groups.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "strings.hpp"

namespace udseq {

namespace {

constexpr double kUnitTolerance = 1e-12;

std::uint64_t factorial(int n) {
  std::uint64_t f = 1;
  for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
  return f;
}

const TorusPoint& as_torus(const GroupElement& a) { return std::get<TorusPoint>(a); }
const IntTuple& as_ints(const GroupElement& a) { return std::get<IntTuple>(a); }
const Quaternion& as_quat(const GroupElement& a) { return std::get<Quaternion>(a); }

std::size_t alternative_for(const GroupSpec& spec) {
  switch (spec.kind()) {
    case GroupKind::torus: return 0;
    case GroupKind::su2: return 2;
    default: return 1;
  }
}

int parse_int(std::string_view text, std::string_view what) {
  int v = 0;
  const auto t = detail::trim(text);
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw std::invalid_argument(std::string(what) + " must be an integer, got '" + std::string(t) + "'");
  }
  return v;
}

}  // namespace

GroupSpec GroupSpec::torus(int dimension) {
  if (dimension < 1) throw std::invalid_argument("dimension must be ≥ 1");
  return GroupSpec(GroupKind::torus, {dimension});
}

GroupSpec GroupSpec::cyclic(int order) {
  if (order < 1) throw std::invalid_argument("order must be ≥ 1");
  return GroupSpec(GroupKind::cyclic, {order});
}

GroupSpec GroupSpec::product(std::vector<int> orders) {
  if (orders.empty()) throw std::invalid_argument("product needs at least one factor");
  for (int n : orders) {
    if (n < 1) throw std::invalid_argument("factor orders must be ≥ 1");
  }
  long double total = 1;
  for (int n : orders) total *= n;
  if (total > 1e18L) throw std::invalid_argument("product group order too large");
  return GroupSpec(GroupKind::product, std::move(orders));
}

GroupSpec GroupSpec::permutation(int degree) {
  if (degree < 1) throw std::invalid_argument("degree must be ≥ 1");
  if (degree > kMaxPermutationDegree) throw std::invalid_argument("permutation degree must be ≤ 12");
  return GroupSpec(GroupKind::permutation, {degree});
}

GroupSpec GroupSpec::su2() { return GroupSpec(GroupKind::su2, {}); }

GroupSpec GroupSpec::parse(std::string_view text) {
  const auto t = detail::trim(text);
  if (t == "su2") return su2();
  const auto colon = t.find(':');
  if (colon == std::string_view::npos) {
    throw std::invalid_argument("unknown group '" + std::string(t) + "'");
  }
  const auto head = t.substr(0, colon);
  const auto arg = t.substr(colon + 1);
  if (head == "torus") return torus(parse_int(arg, "dimension"));
  if (head == "cyclic") return cyclic(parse_int(arg, "order"));
  if (head == "perm") return permutation(parse_int(arg, "degree"));
  if (head == "product") {
    std::vector<int> orders;
    for (auto part : detail::split(arg, 'x')) orders.push_back(parse_int(part, "factor order"));
    return product(std::move(orders));
  }
  throw std::invalid_argument("unknown group '" + std::string(t) + "'");
}

int GroupSpec::components() const noexcept {
  switch (kind_) {
    case GroupKind::torus: return params_[0];
    case GroupKind::cyclic: return 1;
    case GroupKind::product: return static_cast<int>(params_.size());
    case GroupKind::permutation: return params_[0];
    case GroupKind::su2: return 4;
  }
  return 0;
}

int GroupSpec::dimension() const {
  if (kind_ != GroupKind::torus) throw std::logic_error("dimension() on a non-torus group");
  return params_[0];
}

int GroupSpec::degree() const {
  if (kind_ != GroupKind::permutation) throw std::logic_error("degree() on a non-permutation group");
  return params_[0];
}

bool GroupSpec::is_finite() const noexcept {
  return kind_ == GroupKind::cyclic || kind_ == GroupKind::product || kind_ == GroupKind::permutation;
}

std::optional<std::uint64_t> GroupSpec::order() const noexcept {
  switch (kind_) {
    case GroupKind::cyclic: return static_cast<std::uint64_t>(params_[0]);
    case GroupKind::product: {
      std::uint64_t n = 1;
      for (int o : params_) n *= static_cast<std::uint64_t>(o);
      return n;
    }
    case GroupKind::permutation: return factorial(params_[0]);
    default: return std::nullopt;
  }
}

std::string GroupSpec::to_string() const {
  switch (kind_) {
    case GroupKind::torus: return "torus:" + std::to_string(params_[0]);
    case GroupKind::cyclic: return "cyclic:" + std::to_string(params_[0]);
    case GroupKind::permutation: return "perm:" + std::to_string(params_[0]);
    case GroupKind::su2: return "su2";
    case GroupKind::product: {
      std::string s = "product:";
      for (std::size_t i = 0; i < params_.size(); ++i) {
        if (i) s += 'x';
        s += std::to_string(params_[i]);
      }
      return s;
    }
  }
  return {};
}

bool is_valid(const GroupSpec& spec, const GroupElement& a) {
  switch (spec.kind()) {
    case GroupKind::torus: {
      if (!std::holds_alternative<TorusPoint>(a)) return false;
      const auto& x = as_torus(a);
      if (x.size() != spec.dimension()) return false;
      return (x.array() >= 0.0).all() && (x.array() < 1.0).all();
    }
    case GroupKind::cyclic:
    case GroupKind::product: {
      if (!std::holds_alternative<IntTuple>(a)) return false;
      const auto& v = as_ints(a);
      if (v.size() != spec.orders().size()) return false;
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] < 0 || v[i] >= spec.orders()[i]) return false;
      }
      return true;
    }
    case GroupKind::permutation: {
      if (!std::holds_alternative<IntTuple>(a)) return false;
      const auto& p = as_ints(a);
      const int n = spec.degree();
      if (static_cast<int>(p.size()) != n) return false;
      std::vector<bool> seen(n, false);
      for (int v : p) {
        if (v < 0 || v >= n || seen[v]) return false;
        seen[v] = true;
      }
      return true;
    }
    case GroupKind::su2: {
      if (!std::holds_alternative<Quaternion>(a)) return false;
      return std::abs(as_quat(a).norm() - 1.0) <= kUnitTolerance;
    }
  }
  return false;
}

void require_valid(const GroupSpec& spec, const GroupElement& a, std::string_view what) {
  if (!is_valid(spec, a)) {
    throw std::invalid_argument(std::string(what) + " is not an element of " + spec.to_string());
  }
}

GroupElement identity(const GroupSpec& spec) {
  switch (spec.kind()) {
    case GroupKind::torus: return TorusPoint(TorusPoint::Zero(spec.dimension()));
    case GroupKind::cyclic:
    case GroupKind::product: return IntTuple(spec.orders().size(), 0);
    case GroupKind::permutation: {
      IntTuple p(spec.degree());
      std::iota(p.begin(), p.end(), 0);
      return p;
    }
    case GroupKind::su2: return Quaternion::Identity();
  }
  return {};
}

GroupElement compose(const GroupSpec& spec, const GroupElement& a, const GroupElement& b) {
  const auto alt = alternative_for(spec);
  if (a.index() != alt || b.index() != alt) {
    throw std::invalid_argument("compose: operands are not elements of " + spec.to_string());
  }
  switch (spec.kind()) {
    case GroupKind::torus: {
      const auto& x = as_torus(a);
      const auto& y = as_torus(b);
      if (x.size() != spec.dimension() || y.size() != spec.dimension()) {
        throw std::invalid_argument("compose: torus dimension mismatch");
      }
      return TorusPoint((x + y).unaryExpr([](double v) { return wrap_unit(v); }));
    }
    case GroupKind::cyclic:
    case GroupKind::product: {
      const auto& x = as_ints(a);
      const auto& y = as_ints(b);
      const auto& orders = spec.orders();
      if (x.size() != orders.size() || y.size() != orders.size()) {
        throw std::invalid_argument("compose: tuple length mismatch");
      }
      IntTuple r(orders.size());
      for (std::size_t i = 0; i < r.size(); ++i) r[i] = (x[i] + y[i]) % orders[i];
      return r;
    }
    case GroupKind::permutation: {
      const auto& p = as_ints(a);
      const auto& q = as_ints(b);
      const auto n = static_cast<std::size_t>(spec.degree());
      if (p.size() != n || q.size() != n) throw std::invalid_argument("compose: degree mismatch");
      IntTuple r(n);
      for (std::size_t i = 0; i < n; ++i) r[i] = p[static_cast<std::size_t>(q[i])];
      return r;
    }
    case GroupKind::su2: {
      Quaternion r = as_quat(a) * as_quat(b);
      r.normalize();
      return r;
    }
  }
  return {};
}

GroupElement inverse(const GroupSpec& spec, const GroupElement& a) {
  require_valid(spec, a);
  switch (spec.kind()) {
    case GroupKind::torus:
      return TorusPoint(as_torus(a).unaryExpr([](double v) { return wrap_unit(-v); }));
    case GroupKind::cyclic:
    case GroupKind::product: {
      const auto& x = as_ints(a);
      IntTuple r(x.size());
      for (std::size_t i = 0; i < r.size(); ++i) r[i] = (spec.orders()[i] - x[i]) % spec.orders()[i];
      return r;
    }
    case GroupKind::permutation: {
      const auto& p = as_ints(a);
      IntTuple r(p.size());
      for (std::size_t i = 0; i < p.size(); ++i) r[static_cast<std::size_t>(p[i])] = static_cast<int>(i);
      return r;
    }
    case GroupKind::su2: return Quaternion(as_quat(a).conjugate());
  }
  return {};
}

double metric(const GroupSpec& spec, const GroupElement& a, const GroupElement& b) {
  const auto alt = alternative_for(spec);
  if (a.index() != alt || b.index() != alt) {
    throw std::invalid_argument("metric: operands are not elements of " + spec.to_string());
  }
  switch (spec.kind()) {
    case GroupKind::torus: {
      const auto& x = as_torus(a);
      const auto& y = as_torus(b);
      double d = 0.0;
      for (Eigen::Index i = 0; i < x.size(); ++i) d = std::max(d, circle_distance(x[i], y[i]));
      return d;
    }
    case GroupKind::cyclic:
    case GroupKind::product:
    case GroupKind::permutation: return as_ints(a) == as_ints(b) ? 0.0 : 1.0;
    case GroupKind::su2: return sphere3_distance(as_quat(a), as_quat(b));
  }
  return 0.0;
}

GroupElement haar_sample(const GroupSpec& spec, CounterRng& rng) {
  switch (spec.kind()) {
    case GroupKind::torus: {
      TorusPoint x(spec.dimension());
      for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = uniform01(rng);
      return x;
    }
    case GroupKind::cyclic:
    case GroupKind::product: {
      IntTuple r(spec.orders().size());
      for (std::size_t i = 0; i < r.size(); ++i) {
        r[i] = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(spec.orders()[i])));
      }
      return r;
    }
    case GroupKind::permutation: {
      IntTuple p(spec.degree());
      std::iota(p.begin(), p.end(), 0);
      for (std::size_t i = p.size(); i > 1; --i) {
        std::swap(p[i - 1], p[uniform_index(rng, i)]);
      }
      return p;
    }
    case GroupKind::su2: {
      Eigen::Vector4d g;
      do {
        for (int i = 0; i < 4; ++i) g[i] = standard_normal(rng);
      } while (g.norm() < 1e-8);
      g.normalize();
      return Quaternion(g[0], g[1], g[2], g[3]);
    }
  }
  return {};
}

GroupElement element_at(const GroupSpec& spec, std::uint64_t rank) {
  const auto n = spec.order();
  if (!n) throw std::invalid_argument("element_at: " + spec.to_string() + " is not finite");
  if (rank >= *n) throw std::out_of_range("element_at: rank out of range");
  switch (spec.kind()) {
    case GroupKind::cyclic:
    case GroupKind::product: {
      const auto& orders = spec.orders();
      IntTuple r(orders.size());
      for (std::size_t i = orders.size(); i-- > 0;) {
        r[i] = static_cast<int>(rank % static_cast<std::uint64_t>(orders[i]));
        rank /= static_cast<std::uint64_t>(orders[i]);
      }
      return r;
    }
    case GroupKind::permutation: {
      const int deg = spec.degree();
      std::vector<int> pool(deg);
      std::iota(pool.begin(), pool.end(), 0);
      IntTuple p;
      p.reserve(deg);
      for (int i = deg; i >= 1; --i) {
        const std::uint64_t f = factorial(i - 1);
        const auto pick = static_cast<std::size_t>(rank / f);
        rank %= f;
        p.push_back(pool[pick]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
      }
      return p;
    }
    default: break;
  }
  return {};
}

std::uint64_t element_rank(const GroupSpec& spec, const GroupElement& a) {
  require_valid(spec, a);
  const auto& v = as_ints(a);
  if (spec.kind() == GroupKind::permutation) {
    const int deg = spec.degree();
    std::uint64_t rank = 0;
    for (int i = 0; i < deg; ++i) {
      int smaller = 0;
      for (int j = i + 1; j < deg; ++j) smaller += v[j] < v[i];
      rank += static_cast<std::uint64_t>(smaller) * factorial(deg - 1 - i);
    }
    return rank;
  }
  std::uint64_t rank = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    rank = rank * static_cast<std::uint64_t>(spec.orders()[i]) + static_cast<std::uint64_t>(v[i]);
  }
  return rank;
}

std::vector<double> components(const GroupSpec& spec, const GroupElement& a) {
  switch (spec.kind()) {
    case GroupKind::torus: {
      const auto& x = as_torus(a);
      return {x.data(), x.data() + x.size()};
    }
    case GroupKind::su2: {
      const auto& q = as_quat(a);
      return {q.w(), q.x(), q.y(), q.z()};
    }
    default: {
      const auto& v = as_ints(a);
      return {v.begin(), v.end()};
    }
  }
}

double parse_real(std::string_view text) {
  const auto t = detail::trim(text);
  const auto slash = t.find('/');
  if (slash != std::string_view::npos) {
    const double num = parse_real(t.substr(0, slash));
    const double den = parse_real(t.substr(slash + 1));
    if (den == 0.0) throw std::invalid_argument("zero denominator in '" + std::string(t) + "'");
    return num / den;
  }
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw std::invalid_argument("not a number: '" + std::string(t) + "'");
  }
  return v;
}

GroupElement parse_element(const GroupSpec& spec, std::string_view text) {
  const auto parts = detail::split_whitespace(text);
  if (static_cast<int>(parts.size()) != spec.components()) {
    throw std::invalid_argument("element '" + std::string(detail::trim(text)) + "' needs " +
                                std::to_string(spec.components()) + " components for " + spec.to_string());
  }
  GroupElement out;
  switch (spec.kind()) {
    case GroupKind::torus: {
      TorusPoint x(spec.dimension());
      for (std::size_t i = 0; i < parts.size(); ++i) x[static_cast<Eigen::Index>(i)] = wrap_unit(parse_real(parts[i]));
      out = x;
      break;
    }
    case GroupKind::su2: {
      Eigen::Vector4d v;
      for (int i = 0; i < 4; ++i) v[i] = parse_real(parts[static_cast<std::size_t>(i)]);
      if (v.norm() == 0.0) throw std::invalid_argument("zero quaternion");
      // Already-unit input (e.g. printed output) is kept bit-exact.
      if (std::abs(v.norm() - 1.0) > 1e-14) v.normalize();
      out = Quaternion(v[0], v[1], v[2], v[3]);
      break;
    }
    default: {
      IntTuple r;
      for (auto p : parts) r.push_back(parse_int(p, "component"));
      out = r;
      break;
    }
  }
  require_valid(spec, out);
  return out;
}

std::string format_element(const GroupSpec& spec, const GroupElement& a) {
  std::string s;
  for (double c : components(spec, a)) {
    if (!s.empty()) s += ' ';
    s += detail::format_double(c);
  }
  return s;
}

GeneratorSet::GeneratorSet(GroupSpec spec_, std::vector<GroupElement> elements_, bool density_claim_)
    : spec(std::move(spec_)), elements(std::move(elements_)), density_claim(density_claim_) {
  if (elements.empty()) throw std::invalid_argument("generator set must be nonempty");
  for (const auto& g : elements) require_valid(spec, g, "generator");
}

}  // namespace udseq
