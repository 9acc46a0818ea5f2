#include "udseq/bernoulli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "strings.hpp"

namespace udseq {

namespace {

constexpr double kMassTolerance = 1e-12;

std::uint64_t parse_count(std::string_view text, std::string_view what) {
  const auto t = detail::trim(text);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw std::invalid_argument(std::string(what) + ": expected a non-negative integer, got '" + std::string(t) + "'");
  }
  return v;
}

}  // namespace

ProbabilitySequence ProbabilitySequence::geometric(double ratio) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("geometric ratio must lie in (0,1)");
  ProbabilitySequence p;
  p.kind_ = LawKind::geometric;
  p.tail_mass_ = 1.0;
  p.tail_ratio_ = ratio;
  p.conforming_ = true;
  p.build_table();
  return p;
}

ProbabilitySequence ProbabilitySequence::finite_uniform(std::uint64_t k) {
  if (k == 0) throw std::invalid_argument("uniform law needs K ≥ 1");
  if (k > (1u << 24)) throw std::invalid_argument("uniform law K is too large");
  ProbabilitySequence p;
  p.kind_ = LawKind::finite_uniform;
  p.head_.assign(k, 1.0 / static_cast<double>(k));
  p.conforming_ = false;
  p.build_table();
  return p;
}

ProbabilitySequence ProbabilitySequence::custom(std::vector<double> head, double tail_ratio) {
  double total = 0.0;
  for (double v : head) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("custom masses must lie in [0,1]");
    total += v;
  }
  if (total > 1.0 + kMassTolerance) throw std::invalid_argument("custom masses sum to more than 1");
  ProbabilitySequence p;
  p.kind_ = LawKind::custom;
  p.head_ = std::move(head);
  p.tail_mass_ = std::max(0.0, 1.0 - total);
  if (p.tail_mass_ <= kMassTolerance) {
    p.tail_mass_ = 0.0;
  } else if (!(tail_ratio > 0.0 && tail_ratio < 1.0)) {
    throw std::invalid_argument("custom law with remaining mass needs tail ratio in (0,1)");
  }
  p.tail_ratio_ = tail_ratio;
  p.conforming_ = p.tail_mass_ > 0.0 && std::all_of(p.head_.begin(), p.head_.end(), [](double v) { return v > 0; });
  p.build_table();
  return p;
}

ProbabilitySequence ProbabilitySequence::parse(std::string_view text) {
  const auto t = detail::trim(text);
  ProbabilitySequence p;
  if (t.starts_with("geometric:")) {
    p = geometric(parse_real(t.substr(10)));
  } else if (t.starts_with("uniform:")) {
    p = finite_uniform(parse_count(t.substr(8), "uniform"));
  } else if (t.starts_with("custom:")) {
    auto rest = t.substr(7);
    if (!rest.starts_with('[')) throw std::invalid_argument("custom law must start with '['");
    const auto close = rest.find(']');
    if (close == std::string_view::npos) throw std::invalid_argument("custom law is missing ']'");
    std::vector<double> head;
    for (auto v : detail::split(rest.substr(1, close - 1), ',')) head.push_back(parse_real(v));
    double ratio = 0.0;
    auto after = detail::trim(rest.substr(close + 1));
    if (!after.empty()) {
      if (!after.starts_with(";")) throw std::invalid_argument("expected ';tail=q' after custom masses");
      after = detail::trim(after.substr(1));
      if (!after.starts_with("tail=")) throw std::invalid_argument("expected 'tail=q' after custom masses");
      ratio = parse_real(after.substr(5));
    }
    p = custom(std::move(head), ratio);
  } else {
    throw std::invalid_argument("unknown probability sequence '" + std::string(t) + "'");
  }
  p.source_ = std::string(t);
  return p;
}

std::string ProbabilitySequence::to_string() const {
  if (!source_.empty()) return source_;
  switch (kind_) {
    case LawKind::geometric: return "geometric:" + detail::format_double(tail_ratio_);
    case LawKind::finite_uniform: return "uniform:" + std::to_string(head_.size());
    case LawKind::custom: {
      std::string s = "custom:[";
      for (std::size_t i = 0; i < head_.size(); ++i) {
        if (i) s += ',';
        s += detail::format_double(head_[i]);
      }
      s += ']';
      if (tail_mass_ > 0.0) s += ";tail=" + detail::format_double(tail_ratio_);
      return s;
    }
  }
  return {};
}

double ProbabilitySequence::probability(std::uint64_t n) const {
  if (n == 0) return 0.0;
  if (n <= head_.size()) return head_[n - 1];
  if (tail_mass_ == 0.0) return 0.0;
  const auto k = static_cast<double>(n - head_.size() - 1);
  return tail_mass_ * (1.0 - tail_ratio_) * std::pow(tail_ratio_, k);
}

double ProbabilitySequence::mass_above(std::uint64_t n) const {
  if (n < head_.size()) {
    return std::accumulate(head_.begin() + static_cast<std::ptrdiff_t>(n), head_.end(), 0.0) + tail_mass_;
  }
  if (tail_mass_ == 0.0) return 0.0;
  return tail_mass_ * std::pow(tail_ratio_, static_cast<double>(n - head_.size()));
}

void ProbabilitySequence::build_table() {
  cdf_.clear();
  double acc = 0.0;
  for (double v : head_) {
    acc += v;
    cdf_.push_back(acc);
  }
  if (tail_mass_ > 0.0) {
    for (std::uint64_t n = head_.size() + 1;; ++n) {
      const double pn = probability(n);
      if (pn < kTableCutoff) break;
      acc += pn;
      cdf_.push_back(acc);
    }
  }
  // Trailing zero-mass entries never get sampled.
  while (!cdf_.empty() && probability(cdf_.size()) == 0.0 && tail_mass_ == 0.0) cdf_.pop_back();
}

std::uint64_t ProbabilitySequence::sample(CounterRng& rng) const {
  const double u = uniform01(rng);
  if (!cdf_.empty() && u < cdf_.back()) {
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return static_cast<std::uint64_t>(it - cdf_.begin()) + 1;
  }
  if (tail_mass_ == 0.0) return cdf_.size();  // rounding slack at the top of the table
  // Conditional on exceeding the table, the index is geometric from
  // table_size + 1 (the tail is memoryless).
  const double v = uniform_left_open(rng);
  const auto extra = static_cast<std::uint64_t>(std::floor(std::log(v) / std::log(tail_ratio_)));
  return static_cast<std::uint64_t>(std::max(cdf_.size(), head_.size())) + 1 + extra;
}

ShiftWindow::ShiftWindow(ProbabilitySequence law, std::uint64_t key, std::int64_t origin)
    : law_(std::make_shared<const ProbabilitySequence>(std::move(law))), key_(key), origin_(origin) {}

Symbol ShiftWindow::read(std::int64_t position) const {
  const std::int64_t coordinate = origin_ + position;
  if (pinned_) {
    const std::int64_t offset = coordinate - pinned_first_;
    if (offset >= 0 && offset < static_cast<std::int64_t>(pinned_->size())) {
      return (*pinned_)[static_cast<std::size_t>(offset)];
    }
  }
  CounterRng rng(derive_key(key_, static_cast<std::uint64_t>(coordinate)));
  return Symbol(law_->sample(rng));
}

std::vector<Symbol> ShiftWindow::entries(std::int64_t radius) const {
  std::vector<Symbol> out;
  out.reserve(static_cast<std::size_t>(2 * radius + 1));
  for (std::int64_t i = -radius; i <= radius; ++i) out.push_back(read(i));
  return out;
}

ShiftWindow ShiftWindow::with_entries(std::int64_t first, std::vector<Symbol> symbols) const {
  ShiftWindow w = *this;
  if (pinned_) throw std::logic_error("window already carries explicit entries");
  w.pinned_ = std::make_shared<const std::vector<Symbol>>(std::move(symbols));
  w.pinned_first_ = origin_ + first;
  return w;
}

ShiftWindow shift(const ShiftWindow& w) {
  ShiftWindow out = w;
  out.advance(1);
  return out;
}

Cylinder::Cylinder(std::int64_t start_, std::vector<std::uint64_t> symbols_)
    : start(start_), symbols(std::move(symbols_)) {
  if (symbols.empty()) throw std::invalid_argument("cylinder needs at least one symbol");
  for (auto s : symbols) {
    if (s == 0) throw std::invalid_argument("cylinder symbols must be ≥ 1");
  }
}

Cylinder Cylinder::parse(std::string_view text) {
  auto t = detail::trim(text);
  std::int64_t start = 0;
  if (const auto colon = t.find(':'); colon != std::string_view::npos) {
    const auto s = detail::trim(t.substr(0, colon));
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), start);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw std::invalid_argument("bad cylinder start '" + std::string(s) + "'");
    }
    t = t.substr(colon + 1);
  }
  std::vector<std::uint64_t> symbols;
  for (auto s : detail::split_whitespace(t)) symbols.push_back(parse_count(s, "cylinder symbol"));
  return Cylinder(start, std::move(symbols));
}

std::string Cylinder::to_string() const {
  std::string s = std::to_string(start) + ":";
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(symbols[i]);
  }
  return s;
}

bool matches(const Cylinder& c, const ShiftWindow& w) {
  for (std::size_t j = 0; j < c.symbols.size(); ++j) {
    const Symbol s = w.read(c.start + static_cast<std::int64_t>(j));
    if (s.is_infinite() || s.index() != c.symbols[j]) return false;
  }
  return true;
}

double cylinder_measure(const ProbabilitySequence& p, const Cylinder& c) {
  double m = 1.0;
  for (auto s : c.symbols) m *= p.probability(s);
  return m;
}

}  // namespace udseq
