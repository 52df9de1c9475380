#include "rst/rule.hpp"

#include <fstream>
#include <sstream>

#include "rst/util.hpp"

namespace rst {

bool RuleSpec::conforms_node(const TreePtr& node, const NodeRule& rule) const {
  if (ctx->scaling.degree(node->root_dec()) > rule.max_node_dec) return false;
  std::map<LabelId, int> counts;
  for (const auto& b : node->branches()) {
    counts[b.label]++;
    if (ctx->scaling.degree(b.edge_dec) > max_edge_dec) return false;
  }
  for (std::size_t i = 0; i < ctx->labels.size(); ++i) {
    LabelId l = LabelId(i);
    auto it = counts.find(l);
    if (!rule.allows(l, it == counts.end() ? 0 : it->second)) return false;
  }
  for (const auto& b : node->branches()) {
    if (ctx->labels[b.label].kind == LabelKind::Noise) continue;  // bare leaf below
    auto it = under_rule.find(b.label);
    if (it == under_rule.end()) return false;
    if (!conforms_node(b.child, it->second)) return false;
  }
  return true;
}

bool RuleSpec::conforms(const TreePtr& tau) const { return conforms_node(tau, root_rule); }

namespace {

struct Line {
  int number;
  std::string text;
};

[[noreturn]] void schema_fail(int line, const std::string& msg) {
  throw RuleSchemaError("rule file line " + std::to_string(line) + ": " + msg);
}

Rational parse_rational(int line, const std::string& v) {
  try {
    return Rational::from_decimal_string(v);
  } catch (const std::exception& e) {
    schema_fail(line, std::string("bad numeric value '") + v + "': " + e.what());
  }
}

// "l{0..3}" or "Xi{1..1}" or "dec<=1"
void parse_rule_item(int line, const std::string& item, const LabelSet& labels, NodeRule& rule) {
  std::string s = trim(item);
  if (s.empty()) return;
  if (s.rfind("dec<=", 0) == 0) {
    rule.max_node_dec = parse_rational(line, s.substr(5));
    return;
  }
  auto brace = s.find('{');
  if (brace == std::string::npos || s.back() != '}')
    schema_fail(line, "expected 'label{min..max}' or 'dec<=bound', got '" + s + "'");
  std::string name = trim(s.substr(0, brace));
  std::string range = s.substr(brace + 1, s.size() - brace - 2);
  auto dots = range.find("..");
  if (!labels.contains(name)) schema_fail(line, "unknown label '" + name + "'");
  int lo, hi;
  try {
    if (dots == std::string::npos) {
      lo = hi = std::stoi(range);
    } else {
      lo = std::stoi(range.substr(0, dots));
      hi = std::stoi(range.substr(dots + 2));
    }
  } catch (const std::exception&) {
    schema_fail(line, "bad multiplicity range '" + range + "'");
  }
  if (lo < 0 || hi < lo) schema_fail(line, "bad multiplicity range '" + range + "'");
  rule.multiplicity[labels.find(name)] = {lo, hi};
}

void check_label_assumptions(const LabelSet& labels, const ScalingSpec& scaling) {
  const Rational abs_s = scaling.total();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const Label& l = labels[LabelId(i)];
    if (l.kind == LabelKind::Kernel) {
      if (!l.degree.is_positive())
        throw AlgebraicAssumptionError("kernel label '" + l.name + "' must have degree > 0");
      continue;
    }
    if (!(Rational(0) - abs_s < l.degree))
      throw AlgebraicAssumptionError("noise label '" + l.name + "': degree " + l.degree.str() +
                                     " violates -|s| < degree");
    if (!(l.degree < l.reg - abs_s / Rational(2)))
      throw AlgebraicAssumptionError("noise label '" + l.name + "': degree " + l.degree.str() +
                                     " violates degree < reg - |s|/2 (reg = " + l.reg.str() + ")");
    Rational half_shift = l.degree + abs_s / Rational(2);
    bool same_sign = (half_shift.is_positive() && l.reg.is_positive()) ||
                     (half_shift.is_negative() && l.reg.is_negative());
    if (!same_sign)
      throw AlgebraicAssumptionError("noise label '" + l.name + "': degree + |s|/2 (" +
                                     half_shift.str() + ") and reg (" + l.reg.str() +
                                     ") must have the same sign");
  }
}

}  // namespace

RuleSpec parse_rule(const std::string& text) {
  std::vector<Line> lines;
  {
    std::istringstream is(text);
    std::string raw;
    int n = 0;
    while (std::getline(is, raw)) {
      ++n;
      auto hash = raw.find('#');
      if (hash != std::string::npos) raw = raw.substr(0, hash);
      raw = trim(raw);
      if (!raw.empty()) lines.push_back({n, raw});
    }
  }

  std::string section;
  int d = -1;
  std::vector<Rational> svec;
  LabelSet labels;
  struct PendingRule {
    int line;
    std::string context;  // "root" or label name
    std::string items;
  };
  std::vector<PendingRule> pending_rules;
  Rational max_edge_dec(0);
  bool have_R = false, have_kappa = false, have_kappa_bar = false, have_N = false,
       have_max_noise = false;
  RuleSpec spec;
  spec.source_text = text;

  for (const auto& ln : lines) {
    if (ln.text.front() == '[') {
      if (ln.text.back() != ']') schema_fail(ln.number, "unterminated section header");
      section = ln.text.substr(1, ln.text.size() - 2);
      if (section != "scaling" && section != "labels" && section != "rule" &&
          section != "truncation" && section != "constants")
        schema_fail(ln.number, "unknown section [" + section + "]");
      continue;
    }
    auto eq = ln.text.find('=');
    if (eq == std::string::npos) schema_fail(ln.number, "expected 'key = value'");
    std::string key = trim(ln.text.substr(0, eq));
    std::string value = trim(ln.text.substr(eq + 1));
    if (section.empty()) schema_fail(ln.number, "entry outside any section");

    if (section == "scaling") {
      if (key == "d") {
        d = std::stoi(value);
        if (d < 1 || d > 4) schema_fail(ln.number, "d must be in 1..4");
      } else if (key == "s") {
        for (const auto& part : split(value, ','))
          svec.push_back(parse_rational(ln.number, trim(part)));
      } else {
        schema_fail(ln.number, "unknown key '" + key + "' in [scaling]");
      }
    } else if (section == "labels") {
      // name = kind deg=<v> [reg=<v>]
      Label l;
      l.name = key;
      if (l.name.empty() || !std::isalpha(static_cast<unsigned char>(l.name[0])))
        schema_fail(ln.number, "label name must start with a letter");
      bool have_deg = false, have_reg = false;
      for (const auto& tok : split(value, ' ')) {
        std::string t = trim(tok);
        if (t.empty()) continue;
        if (t == "noise") l.kind = LabelKind::Noise;
        else if (t == "kernel") l.kind = LabelKind::Kernel;
        else if (t.rfind("deg=", 0) == 0) { l.degree = parse_rational(ln.number, t.substr(4)); have_deg = true; }
        else if (t.rfind("reg=", 0) == 0) { l.reg = parse_rational(ln.number, t.substr(4)); have_reg = true; }
        else schema_fail(ln.number, "unknown token '" + t + "' in label definition");
      }
      if (!have_deg) schema_fail(ln.number, "label '" + key + "' missing deg=");
      if (l.kind == LabelKind::Noise && !have_reg)
        schema_fail(ln.number, "noise label '" + key + "' missing reg=");
      if (l.kind == LabelKind::Kernel && have_reg)
        schema_fail(ln.number, "kernel label '" + key + "' must not set reg=");
      try {
        labels.add(l);
      } catch (const std::invalid_argument& e) {
        schema_fail(ln.number, e.what());
      }
    } else if (section == "rule") {
      if (key == "max_edge_dec") {
        max_edge_dec = parse_rational(ln.number, value);
      } else if (key == "root") {
        pending_rules.push_back({ln.number, "root", value});
      } else if (key.rfind("under(", 0) == 0 && key.back() == ')') {
        pending_rules.push_back({ln.number, key.substr(6, key.size() - 7), value});
      } else {
        schema_fail(ln.number, "unknown key '" + key + "' in [rule]");
      }
    } else if (section == "truncation") {
      if (key == "R") { spec.truncation = parse_rational(ln.number, value); have_R = true; }
      else if (key == "max_noise") { spec.max_noise = std::stoi(value); have_max_noise = true; }
      else if (key == "basis_cap") spec.basis_cap = std::stoi(value);
      else schema_fail(ln.number, "unknown key '" + key + "' in [truncation]");
    } else if (section == "constants") {
      if (key == "kappa") { spec.kappa = parse_rational(ln.number, value); have_kappa = true; }
      else if (key == "kappa_bar") { spec.kappa_bar = parse_rational(ln.number, value); have_kappa_bar = true; }
      else if (key == "N") { spec.shift_budget = std::stoi(value); have_N = true; }
      else schema_fail(ln.number, "unknown key '" + key + "' in [constants]");
    }
  }

  if (d < 1) throw RuleSchemaError("rule file: missing [scaling] d");
  if (int(svec.size()) != d)
    throw RuleSchemaError("rule file: s must have exactly d entries");
  if (labels.size() == 0) throw RuleSchemaError("rule file: no labels defined");
  if (!have_R) throw RuleSchemaError("rule file: missing truncation R");
  if (!have_max_noise) throw RuleSchemaError("rule file: missing truncation max_noise");
  if (!have_kappa || !have_kappa_bar || !have_N)
    throw RuleSchemaError("rule file: [constants] must define kappa, kappa_bar and N");
  if (!spec.truncation.is_positive()) throw RuleSchemaError("rule file: R must be > 0");
  if (!spec.kappa.is_positive() || !spec.kappa_bar.is_positive())
    throw RuleSchemaError("rule file: kappa and kappa_bar must be > 0");
  if (spec.shift_budget < 1) throw RuleSchemaError("rule file: N must be >= 1");

  auto ctx = std::make_shared<TreeContext>();
  ctx->scaling = ScalingSpec(svec);
  ctx->labels = labels;
  spec.ctx = ctx;
  spec.max_edge_dec = max_edge_dec;

  bool have_root = false;
  for (const auto& pr : pending_rules) {
    NodeRule rule;
    rule.max_node_dec = Rational(0);
    for (const auto& item : split(pr.items, ' '))
      parse_rule_item(pr.line, item, ctx->labels, rule);
    if (pr.context == "root") {
      spec.root_rule = rule;
      have_root = true;
    } else {
      if (!ctx->labels.contains(pr.context))
        schema_fail(pr.line, "under(" + pr.context + "): unknown label");
      LabelId l = ctx->labels.find(pr.context);
      if (ctx->labels[l].kind != LabelKind::Kernel)
        schema_fail(pr.line, "under(" + pr.context + "): label must be a kernel label");
      spec.under_rule[l] = rule;
    }
  }
  if (!have_root) throw RuleSchemaError("rule file: [rule] must define the root node rule");
  for (LabelId l : ctx->labels.kernel_labels())
    if (!spec.under_rule.count(l))
      throw RuleSchemaError("rule file: missing under(" + ctx->labels[l].name + ") node rule");

  check_label_assumptions(ctx->labels, ctx->scaling);
  return spec;
}

RuleSpec parse_rule_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw RuleSchemaError("cannot open rule file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_rule(ss.str());
}

}  // namespace rst
