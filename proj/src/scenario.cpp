#include "amentropy/scenario.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace amentropy {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw validation_error("scenario " + where + ": " + what);
}

const json& need(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) fail(where, std::string("missing field '") + key + "'");
  return *it;
}

int get_int(const json& j, const char* key, const std::string& where) {
  const json& v = need(j, key, where);
  if (!v.is_number_integer()) fail(where, std::string("field '") + key + "' must be an integer");
  return v.get<int>();
}

std::vector<double> get_doubles(const json& v, const std::string& where) {
  if (!v.is_array()) fail(where, "expected an array of numbers");
  std::vector<double> out;
  for (const json& x : v) {
    if (!x.is_number()) fail(where, "expected an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

Driver parse_driver(const json& j) {
  if (!j.is_object()) fail("driver", "must be an object");
  std::string kind = need(j, "kind", "driver").get<std::string>();
  if (kind == "point") return Driver::point();
  if (kind == "cycle") return Driver::cycle(get_int(j, "size", "driver"));
  if (kind == "custom") {
    Driver d;
    const json& theta = need(j, "theta", "driver");
    if (!theta.is_array()) fail("driver", "'theta' must be an array");
    for (const json& x : theta) d.theta.push_back(x.get<int>());
    d.size = static_cast<int>(d.theta.size());
    d.weights = get_doubles(need(j, "weights", "driver"), "driver.weights");
    d.validate();
    return d;
  }
  fail("driver", "unknown kind '" + kind + "'");
}

std::vector<std::vector<std::vector<int>>> parse_matrices(const json& j, int size,
                                                          int alphabet) {
  if (!j.is_array()) fail("matrices", "must be an array, one matrix per base point");
  if (static_cast<int>(j.size()) != size)
    fail("matrices", "need exactly " + std::to_string(size) + " matrices, got " +
                         std::to_string(j.size()));
  std::vector<std::vector<std::vector<int>>> out;
  for (const json& m : j) {
    if (!m.is_array() || static_cast<int>(m.size()) != alphabet)
      fail("matrices", "each matrix must have one row per letter");
    std::vector<std::vector<int>> rows;
    for (const json& r : m) {
      if (!r.is_array() || static_cast<int>(r.size()) != alphabet)
        fail("matrices", "each matrix row must have one entry per letter");
      std::vector<int> row;
      for (const json& x : r) {
        if (!x.is_number_integer() || (x.get<int>() != 0 && x.get<int>() != 1))
          fail("matrices", "entries must be 0 or 1");
        row.push_back(x.get<int>());
      }
      rows.push_back(std::move(row));
    }
    out.push_back(std::move(rows));
  }
  return out;
}

std::vector<std::vector<double>> parse_site(const json& j, const RandomSFT& sys,
                                            const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != sys.driver.size)
    fail(where, "'site' needs one row per base point");
  std::vector<std::vector<double>> site;
  for (const json& r : j) {
    std::vector<double> row = get_doubles(r, where + ".site");
    if (static_cast<int>(row.size()) != sys.alphabet)
      fail(where, "'site' rows need one entry per letter");
    site.push_back(std::move(row));
  }
  return site;
}

PotentialFamily parse_potential(const json& j, const RandomSFT& sys) {
  if (!j.is_object()) fail("potential", "must be an object");
  std::string kind = need(j, "kind", "potential").get<std::string>();
  if (kind == "zero") return PotentialFamily::zero();
  if (kind == "additive")
    return PotentialFamily::additive(parse_site(need(j, "site", "potential"), sys, "potential"));
  if (kind == "additive_plus_sqrt")
    return PotentialFamily::additive_plus_sqrt(
        parse_site(need(j, "site", "potential"), sys, "potential"));
  if (kind == "custom")
    fail("potential", "custom evaluators are code, not data; build them through the API");
  fail("potential", "unknown kind '" + kind + "'");
}

Word parse_word(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "a word is an array of letters");
  Word w;
  for (const json& x : j) {
    if (!x.is_number_integer()) fail(where, "a word is an array of letters");
    w.push_back(x.get<int>());
  }
  return w;
}

FiberCover parse_cover(const json& j, const RandomSFT& sys) {
  if (!j.is_object()) fail("cover", "must be an object");
  std::string kind = need(j, "kind", "cover").get<std::string>();
  if (kind == "letters") return FiberCover::letter_partition(sys.driver, sys.alphabet);
  if (kind == "letter_complements")
    return FiberCover::letter_complements(sys.driver, sys.alphabet);
  if (kind == "elements") {
    const json& els = need(j, "elements", "cover");
    if (!els.is_array() || els.empty()) fail("cover", "'elements' must be a nonempty array");
    FiberCover u;
    for (const json& e : els) {
      FiberCoverElement el;
      if (e.contains("omega_set")) {
        for (const json& x : e["omega_set"]) el.omega_set.push_back(x.get<int>());
      } else {
        for (int w = 0; w < sys.driver.size; ++w) el.omega_set.push_back(w);
      }
      const json& win = need(e, "window", "cover.element");
      if (!win.is_array() || win.size() != 2)
        fail("cover.element", "'window' must be [lo, hi]");
      el.window = Window::interval(win[0].get<Coord>(), win[1].get<Coord>());
      const json& words = need(e, "words", "cover.element");
      if (!words.is_array() || words.empty())
        fail("cover.element", "'words' must be a nonempty array");
      for (const json& w : words) el.words.push_back(parse_word(w, "cover.element.words"));
      el.complement = e.value("complement", false);
      u.elements.push_back(std::move(el));
    }
    return u;
  }
  fail("cover", "unknown kind '" + kind + "'");
}

RelativeMarkovMeasure parse_measure(const json& j, const RandomSFT& sys,
                                    const std::string& name) {
  std::string where = "measure '" + name + "'";
  if (!j.is_object()) fail(where, "must be an object");
  std::string kind = need(j, "kind", where).get<std::string>();
  if (kind == "bernoulli")
    return bernoulli_measure(sys, get_doubles(need(j, "p", where), where + ".p"));
  if (kind == "parry") return parry_measure(sys);
  if (kind == "uniform") return uniform_markov(sys);
  if (kind == "tables") {
    RelativeMarkovMeasure mu;
    const json& pi = need(j, "pi", where);
    if (!pi.is_array()) fail(where, "'pi' must be an array of rows");
    for (const json& r : pi) mu.pi.push_back(get_doubles(r, where + ".pi"));
    const json& q = need(j, "q", where);
    if (!q.is_array()) fail(where, "'q' must be an array of kernels");
    for (const json& k : q) {
      std::vector<std::vector<double>> kern;
      if (!k.is_array()) fail(where, "each kernel must be an array of rows");
      for (const json& r : k) kern.push_back(get_doubles(r, where + ".q"));
      mu.q.push_back(std::move(kern));
    }
    mu.validate(sys);
    return mu;
  }
  fail(where, "unknown kind '" + kind + "'");
}

}  // namespace

const RelativeMarkovMeasure* Scenario::find_measure(const std::string& name) const {
  if (name.empty()) return measures.empty() ? nullptr : &measures.begin()->second;
  auto it = measures.find(name);
  return it == measures.end() ? nullptr : &it->second;
}

Scenario scenario_from_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw validation_error(std::string("scenario parse error: ") + e.what());
  }
  if (!j.is_object()) throw validation_error("scenario: top level must be an object");

  Scenario sc;
  sc.id = need(j, "id", "file").get<std::string>();
  Driver d = parse_driver(need(j, "driver", "file"));
  int alphabet = get_int(j, "alphabet", "file");
  auto matrices = parse_matrices(need(j, "matrices", "file"), d.size, alphabet);
  sc.sys = RandomSFT::make(std::move(d), alphabet, std::move(matrices));

  if (j.contains("potential")) sc.potential = parse_potential(j["potential"], sc.sys);
  sc.cover = j.contains("cover")
                 ? parse_cover(j["cover"], sc.sys)
                 : FiberCover::letter_partition(sc.sys.driver, sc.sys.alphabet);

  if (j.contains("measures")) {
    const json& ms = j["measures"];
    if (!ms.is_object()) fail("measures", "must map names to measure specs");
    for (auto it = ms.begin(); it != ms.end(); ++it)
      sc.measures.emplace(it.key(), parse_measure(it.value(), sc.sys, it.key()));
  }

  if (j.contains("pinsker")) {
    std::string mode = j["pinsker"].get<std::string>();
    std::string note = j.value("pinsker_note", std::string());
    if (mode == "trivial")
      sc.pinsker = PinskerScenario::trivial(note);
    else if (mode == "full")
      sc.pinsker = PinskerScenario::full(note);
    else
      fail("pinsker", "mode must be 'trivial' or 'full', got '" + mode + "'");
  }

  sc.window_bound = j.value("window_bound", 20);
  if (sc.window_bound < 1) fail("window_bound", "must be positive");
  sc.seed = j.value("seed", std::uint64_t{1});
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("scenario file not readable: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return scenario_from_string(buf.str());
}

std::string shipped_scenario_dir() { return AMENTROPY_SCENARIO_DIR; }

}  // namespace amentropy
