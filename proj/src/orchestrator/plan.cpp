#include "pentestmcp/orchestrator/plan.hpp"

#include <cctype>
#include <fstream>
#include <regex>
#include <sstream>

namespace pentestmcp::orchestrator {

namespace {

struct Placeholder {
  std::size_t begin;
  std::size_t end;  // one past '}'
  std::string name;
  bool as_int;
};

bool valid_name(std::string_view name) {
  if (name.empty() || !(std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_')) return false;
  for (char c : name) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  return true;
}

std::vector<Placeholder> scan(std::string_view text) {
  std::vector<Placeholder> out;
  std::size_t pos = 0;
  while ((pos = text.find("${", pos)) != std::string_view::npos) {
    std::size_t close = text.find('}', pos + 2);
    if (close == std::string_view::npos) break;
    std::string_view body = text.substr(pos + 2, close - pos - 2);
    bool as_int = false;
    if (body.size() > 4 && body.substr(body.size() - 4) == ":int") {
      as_int = true;
      body.remove_suffix(4);
    }
    if (valid_name(body)) {
      out.push_back({pos, close + 1, std::string(body), as_int});
      pos = close + 1;
    } else {
      pos += 2;
    }
  }
  return out;
}

const std::string& lookup(const Bindings& bindings, const std::string& name) {
  auto it = bindings.find(name);
  if (it == bindings.end()) throw PlanError("unbound variable '" + name + "'");
  return it->second;
}

template <typename J>
std::vector<std::string> string_list(const J& node, const std::string& where) {
  std::vector<std::string> out;
  if (node.is_null()) return out;
  if (!node.is_array()) throw PlanError(where + ": expected an array of strings");
  for (const auto& item : node) {
    if (!item.is_string()) throw PlanError(where + ": expected an array of strings");
    out.push_back(item.template get<std::string>());
  }
  return out;
}

}  // namespace

std::set<std::string> placeholders(std::string_view text) {
  std::set<std::string> names;
  for (const auto& p : scan(text)) names.insert(p.name);
  return names;
}

std::set<std::string> placeholders(const json& value) {
  std::set<std::string> names;
  if (value.is_string()) return placeholders(value.get_ref<const std::string&>());
  if (value.is_object()) {
    for (const auto& [k, v] : value.items()) {
      names.merge(placeholders(std::string_view(k)));
      names.merge(placeholders(v));
    }
  } else if (value.is_array()) {
    for (const auto& v : value) names.merge(placeholders(v));
  }
  return names;
}

std::string substitute(std::string_view text, const Bindings& bindings) {
  std::string out;
  std::size_t last = 0;
  for (const auto& p : scan(text)) {
    out.append(text.substr(last, p.begin - last));
    out += lookup(bindings, p.name);
    last = p.end;
  }
  out.append(text.substr(last));
  return out;
}

json substitute(const json& value, const Bindings& bindings) {
  if (value.is_string()) {
    const std::string& s = value.get_ref<const std::string&>();
    auto found = scan(s);
    if (found.size() == 1 && found[0].as_int && found[0].begin == 0 && found[0].end == s.size()) {
      const std::string& raw = lookup(bindings, found[0].name);
      try {
        std::size_t used = 0;
        long long n = std::stoll(raw, &used);
        if (used == raw.size()) return n;
      } catch (const std::exception&) {
      }
      throw PlanError("variable '" + found[0].name + "' is not an integer: '" + raw + "'");
    }
    return substitute(std::string_view(s), bindings);
  }
  if (value.is_object()) {
    json out = json::object();
    for (const auto& [k, v] : value.items()) out[substitute(std::string_view(k), bindings)] = substitute(v, bindings);
    return out;
  }
  if (value.is_array()) {
    json out = json::array();
    for (const auto& v : value) out.push_back(substitute(v, bindings));
    return out;
  }
  return value;
}

void check_closed(const Plan& plan, const Bindings& initial) {
  std::set<std::string> known;
  for (const auto& [k, _] : initial) known.insert(k);
  for (const auto& t : plan.targets) {
    for (const auto& name : placeholders(t)) {
      if (!known.count(name)) throw PlanError("target '" + t + "' references unbound variable '" + name + "'");
    }
  }
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const PlanStep& step = plan.steps[i];
    auto used = placeholders(step.arguments);
    for (const auto& e : step.expect) used.merge(placeholders(e));
    for (const auto& name : used) {
      if (!known.count(name)) {
        throw PlanError("step " + std::to_string(i + 1) + " references unbound variable '" + name + "'");
      }
    }
    for (const auto& b : step.bind) known.insert(b.var);
  }
}

std::optional<std::string> extract_binding(const std::string& pattern, const std::string& text) {
  std::regex re;
  try {
    re = std::regex(pattern, std::regex::ECMAScript);
  } catch (const std::regex_error& e) {
    throw PlanError("invalid extraction pattern '" + pattern + "': " + e.what());
  }
  if (re.mark_count() != 1) {
    throw PlanError("extraction pattern '" + pattern + "' must have exactly one capture group");
  }
  std::smatch m;
  if (!std::regex_search(text, m, re)) return std::nullopt;
  return m[1].str();
}

Plan parse_plan(std::string_view text) {
  using OJ = nlohmann::ordered_json;
  OJ doc;
  try {
    doc = OJ::parse(text.begin(), text.end(), nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::parse_error& e) {
    throw PlanError(std::string("plan is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw PlanError("plan must be an object");

  Plan plan;
  try {
    plan.name = doc.at("name").get<std::string>();
    plan.description = doc.value("description", "");
    if (doc.contains("bindings")) {
      for (const auto& [k, v] : doc["bindings"].items()) {
        if (!valid_name(k)) throw PlanError("bindings: invalid variable name '" + k + "'");
        plan.bindings[k] = v.is_string() ? v.get<std::string>() : v.dump();
      }
    }
    plan.targets = string_list(doc.value("targets", OJ()), "targets");
    const auto& steps = doc.at("steps");
    if (!steps.is_array()) throw PlanError("steps: expected an array");
    for (std::size_t i = 0; i < steps.size(); ++i) {
      const auto& s = steps[i];
      std::string where = "steps[" + std::to_string(i) + "]";
      if (!s.is_object()) throw PlanError(where + ": expected an object");
      PlanStep step;
      step.server = s.at("server").get<std::string>();
      if (!kKnownServers.count(step.server)) throw PlanError(where + ".server: unknown server '" + step.server + "'");
      step.tool = s.at("tool").get<std::string>();
      if (s.contains("arguments")) {
        if (!s["arguments"].is_object()) throw PlanError(where + ".arguments: expected an object");
        step.arguments = json::parse(s["arguments"].dump());
      }
      step.expect = string_list(s.value("expect", OJ()), where + ".expect");
      if (s.contains("bind")) {
        if (!s["bind"].is_array()) throw PlanError(where + ".bind: expected an array");
        for (const auto& b : s["bind"]) {
          BindSpec spec{b.at("var").get<std::string>(), b.at("pattern").get<std::string>()};
          if (!valid_name(spec.var)) throw PlanError(where + ".bind: invalid variable name '" + spec.var + "'");
          extract_binding(spec.pattern, "");  // validates the pattern
          step.bind.push_back(std::move(spec));
        }
      }
      step.expect_error = s.value("expect_error", false);
      plan.steps.push_back(std::move(step));
    }
  } catch (const nlohmann::json::exception& e) {
    throw PlanError(std::string("malformed plan: ") + e.what());
  }
  return plan;
}

Plan load_plan(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PlanError("cannot open plan file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_plan(buf.str());
}

}  // namespace pentestmcp::orchestrator
