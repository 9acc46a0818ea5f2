#include "udseq/actions.hpp"

#include <charconv>
#include <stdexcept>

#include "strings.hpp"

namespace udseq {

Symbol::Symbol(std::uint64_t index) : value_(index) {
  if (index == 0) throw std::invalid_argument("generator indices start at 1");
}

std::uint64_t Symbol::index() const {
  if (is_infinite()) throw std::logic_error("index() of the infinity token");
  return value_;
}

std::string Symbol::to_string() const { return is_infinite() ? "inf" : std::to_string(value_); }

Symbol Symbol::parse(std::string_view text) {
  const auto t = detail::trim(text);
  if (t == "inf") return infinity();
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw std::invalid_argument("bad generator index '" + std::string(t) + "'");
  }
  return Symbol(v);
}

Word::Word(std::vector<Symbol> symbols) : symbols_(std::move(symbols)) {
  if (symbols_.empty()) throw std::invalid_argument("words must be nonempty");
}

Word::Word(std::initializer_list<std::uint64_t> indices) {
  for (auto i : indices) symbols_.emplace_back(i);
  if (symbols_.empty()) throw std::invalid_argument("words must be nonempty");
}

Word Word::repeat(std::uint64_t index, std::size_t length) {
  return Word(std::vector<Symbol>(length, Symbol(index)));
}

std::string Word::to_string() const {
  std::string s;
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    if (i) s += ',';
    s += symbols_[i].to_string();
  }
  return s;
}

Word concat(const Word& u, const Word& v) {
  auto s = u.symbols();
  s.insert(s.end(), v.symbols().begin(), v.symbols().end());
  return Word(std::move(s));
}

ActionSpec ActionSpec::translation(GeneratorSet generators, IndexPolicy policy) {
  return ActionSpec(ActionKind::translation, std::move(generators), policy);
}

ActionSpec ActionSpec::rotation_family(const std::vector<double>& angles, IndexPolicy policy) {
  const auto circle = GroupSpec::torus(1);
  std::vector<GroupElement> elements;
  for (double a : angles) elements.emplace_back(TorusPoint::Constant(1, wrap_unit(a)));
  return ActionSpec(ActionKind::rotation_family, GeneratorSet(circle, std::move(elements)), policy);
}

ActionSpec ActionSpec::doubling_fixture() {
  const auto circle = GroupSpec::torus(1);
  // The stored element is a placeholder; the map is x -> 2x mod 1.
  return ActionSpec(ActionKind::doubling_fixture, GeneratorSet(circle, {identity(circle)}, false),
                    IndexPolicy::cycle);
}

namespace {

// Splits "head(body)" into head and body; body empty when no parentheses.
std::pair<std::string_view, std::string_view> split_call(std::string_view text) {
  const auto t = detail::trim(text);
  const auto open = t.find('(');
  if (open == std::string_view::npos) return {t, {}};
  if (t.back() != ')') throw std::invalid_argument("unbalanced parentheses in '" + std::string(t) + "'");
  return {detail::trim(t.substr(0, open)), t.substr(open + 1, t.size() - open - 2)};
}

std::vector<GroupElement> parse_generators(const GroupSpec& spec, std::string_view list, std::uint64_t seed) {
  std::vector<GroupElement> out;
  const auto t = detail::trim(list);
  if (t.starts_with("haar:")) {
    std::uint64_t count = 0;
    const auto n = t.substr(5);
    auto [ptr, ec] = std::from_chars(n.data(), n.data() + n.size(), count);
    if (ec != std::errc() || ptr != n.data() + n.size() || count == 0) {
      throw std::invalid_argument("bad Haar generator count in '" + std::string(t) + "'");
    }
    CounterRng rng(derive_key(seed, Stream::generators));
    for (std::uint64_t i = 0; i < count; ++i) out.push_back(haar_sample(spec, rng));
    return out;
  }
  for (auto item : detail::split(t, ',')) out.push_back(parse_element(spec, item));
  return out;
}

}  // namespace

ActionSpec ActionSpec::parse(std::string_view text, std::uint64_t seed) {
  const auto [head, body] = split_call(text);
  ActionSpec result = doubling_fixture();
  if (head == "doubling-fixture") {
    if (!detail::trim(body).empty()) throw std::invalid_argument("doubling-fixture takes no arguments");
  } else if (head == "translation") {
    const auto parts = detail::split(body, ';');
    if (parts.size() < 2) throw std::invalid_argument("translation needs '(group; gens=...)'");
    const auto spec = GroupSpec::parse(parts[0]);
    std::string_view gens;
    IndexPolicy policy = IndexPolicy::cycle;
    for (std::size_t i = 1; i < parts.size(); ++i) {
      if (parts[i].starts_with("gens=")) {
        gens = parts[i].substr(5);
      } else if (parts[i] == "strict") {
        policy = IndexPolicy::strict;
      } else {
        throw std::invalid_argument("unknown translation option '" + std::string(parts[i]) + "'");
      }
    }
    if (gens.empty()) throw std::invalid_argument("translation needs gens=...");
    result = translation(GeneratorSet(spec, parse_generators(spec, gens, seed)), policy);
  } else if (head == "rotation-family") {
    IndexPolicy policy = IndexPolicy::cycle;
    std::vector<double> angles;
    for (auto part : detail::split(body, ';')) {
      if (part.starts_with("angles=")) {
        for (auto a : detail::split(part.substr(7), ',')) angles.push_back(parse_real(a));
      } else if (part == "strict") {
        policy = IndexPolicy::strict;
      } else {
        throw std::invalid_argument("unknown rotation-family option '" + std::string(part) + "'");
      }
    }
    if (angles.empty()) throw std::invalid_argument("rotation-family needs angles=...");
    result = rotation_family(angles, policy);
  } else {
    throw std::invalid_argument("unknown action '" + std::string(head) + "'");
  }
  result.source_ = std::string(detail::trim(text));
  return result;
}

std::string ActionSpec::invariant_measure() const {
  return kind_ == ActionKind::translation ? "haar" : "lebesgue";
}

std::size_t ActionSpec::resolve(Symbol s) const {
  const std::uint64_t n = s.index();
  const std::uint64_t k = generator_count();
  if (n > k && policy_ == IndexPolicy::strict) {
    throw std::invalid_argument("generator index " + std::to_string(n) + " exceeds the " + std::to_string(k) +
                                " available generators");
  }
  return static_cast<std::size_t>((n - 1) % k);
}

void ActionSpec::require_invertible(std::string_view who) const {
  if (!invertible()) {
    throw std::invalid_argument(std::string(who) + ": the doubling fixture is not invertible and is only "
                                "accepted by the sensitivity probes");
  }
}

std::string ActionSpec::to_string() const {
  if (!source_.empty()) return source_;
  switch (kind_) {
    case ActionKind::doubling_fixture: return "doubling-fixture";
    case ActionKind::rotation_family: {
      std::string s = "rotation-family(angles=";
      for (std::size_t i = 0; i < generator_count(); ++i) {
        if (i) s += ',';
        s += format_element(space(), generators_.elements[i]);
      }
      return s + (policy_ == IndexPolicy::strict ? "; strict)" : ")");
    }
    case ActionKind::translation: {
      std::string s = "translation(" + space().to_string() + "; gens=";
      for (std::size_t i = 0; i < generator_count(); ++i) {
        if (i) s += ',';
        s += format_element(space(), generators_.elements[i]);
      }
      return s + (policy_ == IndexPolicy::strict ? "; strict)" : ")");
    }
  }
  return {};
}

GroupElement apply_generator(const ActionSpec& action, Symbol index, const GroupElement& x) {
  if (index.is_infinite()) return x;
  const std::size_t slot = action.resolve(index);
  if (action.kind() == ActionKind::doubling_fixture) {
    const auto& p = std::get<TorusPoint>(x);
    return TorusPoint(p.unaryExpr([](double v) { return wrap_unit(2.0 * v); }));
  }
  return compose(action.space(), x, action.generators().elements[slot]);
}

GroupElement apply_word(const ActionSpec& action, const Word& word, GroupElement x) {
  for (const Symbol s : word.symbols()) x = apply_generator(action, s, x);
  return x;
}

}  // namespace udseq
