#include <algorithm>
#include <cctype>

#include "stratmc/automata.hpp"

namespace stratmc {

namespace {

// Keeps only subset-minimal sets.
std::vector<std::vector<int>> minimize(std::vector<std::vector<int>> sets) {
  for (auto& s : sets) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }
  std::sort(sets.begin(), sets.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
  std::vector<std::vector<int>> out;
  for (auto& s : sets) {
    bool dominated = std::any_of(out.begin(), out.end(), [&](const auto& m) {
      return std::includes(s.begin(), s.end(), m.begin(), m.end());
    });
    if (!dominated) out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

PosBool PosBool::make_and(std::vector<PosBool> kids) {
  PosBool r(Kind::And);
  std::vector<PosBool> flat;
  for (auto& c : kids) {
    if (c.kind_ == Kind::And) {
      flat.insert(flat.end(), c.kids_.begin(), c.kids_.end());
    } else if (c.is_false()) {
      return bottom();
    } else if (!c.is_true()) {
      flat.push_back(std::move(c));
    }
  }
  std::sort(flat.begin(), flat.end());
  flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
  if (flat.empty()) return top();
  if (flat.size() == 1) return flat.front();
  r.kids_ = std::move(flat);
  return r;
}

PosBool PosBool::make_or(std::vector<PosBool> kids) {
  PosBool r(Kind::Or);
  std::vector<PosBool> flat;
  for (auto& c : kids) {
    if (c.kind_ == Kind::Or) {
      flat.insert(flat.end(), c.kids_.begin(), c.kids_.end());
    } else if (c.is_true()) {
      return top();
    } else if (!c.is_false()) {
      flat.push_back(std::move(c));
    }
  }
  std::sort(flat.begin(), flat.end());
  flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
  if (flat.empty()) return bottom();
  if (flat.size() == 1) return flat.front();
  r.kids_ = std::move(flat);
  return r;
}

bool PosBool::operator==(const PosBool& o) const {
  return kind_ == o.kind_ && value_ == o.value_ && positive_ == o.positive_ && kids_ == o.kids_;
}

bool PosBool::operator<(const PosBool& o) const {
  if (kind_ != o.kind_) return kind_ < o.kind_;
  if (value_ != o.value_) return value_ < o.value_;
  if (positive_ != o.positive_) return positive_ < o.positive_;
  return kids_ < o.kids_;
}

bool PosBool::eval(const std::function<bool(int)>& holds) const {
  switch (kind_) {
    case Kind::True: return true;
    case Kind::False: return false;
    case Kind::Leaf: return holds(value_);
    case Kind::Lit: throw std::logic_error("unresolved literal in transition formula");
    case Kind::And:
      return std::all_of(kids_.begin(), kids_.end(), [&](const PosBool& k) { return k.eval(holds); });
    case Kind::Or:
      return std::any_of(kids_.begin(), kids_.end(), [&](const PosBool& k) { return k.eval(holds); });
  }
  return false;
}

PosBool PosBool::dual() const {
  switch (kind_) {
    case Kind::True: return bottom();
    case Kind::False: return top();
    case Kind::Leaf: return *this;
    case Kind::Lit: return lit(value_, !positive_);
    case Kind::And:
    case Kind::Or: {
      std::vector<PosBool> ks;
      for (const auto& k : kids_) ks.push_back(k.dual());
      return kind_ == Kind::And ? make_or(std::move(ks)) : make_and(std::move(ks));
    }
  }
  return *this;
}

PosBool PosBool::map_leaves(const std::function<PosBool(int)>& fn) const {
  switch (kind_) {
    case Kind::Leaf: return fn(value_);
    case Kind::And:
    case Kind::Or: {
      std::vector<PosBool> ks;
      for (const auto& k : kids_) ks.push_back(k.map_leaves(fn));
      return kind_ == Kind::And ? make_and(std::move(ks)) : make_or(std::move(ks));
    }
    default: return *this;
  }
}

PosBool PosBool::resolve(const std::function<bool(int)>& atom_value) const {
  switch (kind_) {
    case Kind::Lit: return atom_value(value_) == positive_ ? top() : bottom();
    case Kind::And:
    case Kind::Or: {
      std::vector<PosBool> ks;
      for (const auto& k : kids_) ks.push_back(k.resolve(atom_value));
      return kind_ == Kind::And ? make_and(std::move(ks)) : make_or(std::move(ks));
    }
    default: return *this;
  }
}

void PosBool::collect_states(std::vector<int>& out) const {
  if (kind_ == Kind::Leaf) out.push_back(value_);
  for (const auto& k : kids_) k.collect_states(out);
}

std::vector<std::vector<int>> PosBool::minimal_models() const {
  switch (kind_) {
    case Kind::True: return {{}};
    case Kind::False: return {};
    case Kind::Leaf: return {{value_}};
    case Kind::Lit: throw std::logic_error("unresolved literal in transition formula");
    case Kind::Or: {
      std::vector<std::vector<int>> all;
      for (const auto& k : kids_) {
        auto m = k.minimal_models();
        all.insert(all.end(), m.begin(), m.end());
      }
      return minimize(std::move(all));
    }
    case Kind::And: {
      std::vector<std::vector<int>> acc{{}};
      for (const auto& k : kids_) {
        auto m = k.minimal_models();
        std::vector<std::vector<int>> next;
        for (const auto& a : acc)
          for (const auto& b : m) {
            auto u = a;
            u.insert(u.end(), b.begin(), b.end());
            next.push_back(std::move(u));
          }
        acc = minimize(std::move(next));
        if (acc.empty()) return acc;
      }
      return acc;
    }
  }
  return {};
}

std::string PosBool::to_string(const std::function<std::string(int)>& state_name) const {
  switch (kind_) {
    case Kind::True: return "true";
    case Kind::False: return "false";
    case Kind::Leaf: return state_name ? state_name(value_) : "s" + std::to_string(value_);
    case Kind::Lit: return (positive_ ? "a" : "!a") + std::to_string(value_);
    default: break;
  }
  std::string out = "(";
  for (std::size_t i = 0; i < kids_.size(); ++i) {
    if (i) out += kind_ == Kind::And ? " & " : " | ";
    out += kids_[i].to_string(state_name);
  }
  return out + ")";
}

namespace {

class PosBoolParser {
 public:
  explicit PosBoolParser(const std::string& s) : s_(s) {}
  PosBool parse() {
    PosBool r = expr();
    skip();
    if (i_ != s_.size()) fail();
    return r;
  }

 private:
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  [[noreturn]] void fail() const {
    throw ParseError("malformed transition formula '" + s_ + "'", i_);
  }
  PosBool expr() {
    std::vector<PosBool> parts{term()};
    for (skip(); i_ < s_.size() && s_[i_] == '|'; skip()) {
      ++i_;
      parts.push_back(term());
    }
    return parts.size() == 1 ? parts[0] : PosBool::make_or(std::move(parts));
  }
  PosBool term() {
    std::vector<PosBool> parts{factor()};
    for (skip(); i_ < s_.size() && s_[i_] == '&'; skip()) {
      ++i_;
      parts.push_back(factor());
    }
    return parts.size() == 1 ? parts[0] : PosBool::make_and(std::move(parts));
  }
  int number() {
    std::size_t start = i_;
    while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
    if (start == i_) fail();
    return std::stoi(s_.substr(start, i_ - start));
  }
  PosBool factor() {
    skip();
    if (i_ >= s_.size()) fail();
    if (s_[i_] == '(') {
      ++i_;
      PosBool r = expr();
      skip();
      if (i_ >= s_.size() || s_[i_] != ')') fail();
      ++i_;
      return r;
    }
    if (s_.compare(i_, 4, "true") == 0) {
      i_ += 4;
      return PosBool::top();
    }
    if (s_.compare(i_, 5, "false") == 0) {
      i_ += 5;
      return PosBool::bottom();
    }
    if (s_[i_] == 's') {
      ++i_;
      return PosBool::leaf(number());
    }
    bool positive = true;
    if (s_[i_] == '!') {
      positive = false;
      ++i_;
    }
    if (i_ < s_.size() && s_[i_] == 'a') {
      ++i_;
      return PosBool::lit(number(), positive);
    }
    fail();
  }
  const std::string& s_;
  std::size_t i_ = 0;
};

}  // namespace

PosBool parse_posbool(const std::string& text) { return PosBoolParser(text).parse(); }

}  // namespace stratmc
