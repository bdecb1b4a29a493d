#include "kronred/json_io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "kronred/errors.hpp"

namespace kronred {

Json network_to_json(const Network& net) {
  Json j;
  j["species"] = Json::array();
  for (const auto& s : net.species) j["species"].push_back(s.name);

  j["complexes"] = Json::array();
  for (const auto& c : net.complexes) {
    Json terms = Json::array();
    for (const auto& [sp, coeff] : c.composition)
      terms.push_back(Json::array({net.species[sp].name, coeff}));
    j["complexes"].push_back(terms);
  }

  j["reactions"] = Json::array();
  for (const auto& r : net.reactions) {
    Json jr;
    jr["id"] = r.id;
    jr["substrate"] = r.substrate;
    jr["product"] = r.product;
    jr["reversible"] = r.reversible;
    Json law;
    law["type"] = r.law.kind == LawKind::MassAction ? "massaction" : "mm";
    law["kf"] = r.law.k_forward;
    if (r.reversible) law["kr"] = r.law.k_reverse;
    if (r.law.kind == LawKind::MichaelisMenten) {
      Json km = Json::array();
      for (const auto& [sp, v] : r.law.km) km.push_back(Json::array({net.species[sp].name, v}));
      law["km"] = km;
    }
    jr["law"] = law;
    j["reactions"].push_back(jr);
  }

  j["boundary"] = Json::array();
  for (const auto& b : net.boundary) {
    Json jb;
    jb["complex"] = b.complex;
    if (b.form == BoundaryFlux::Form::Constant) {
      jb["form"] = "constant";
      jb["value"] = b.value;
    } else {
      jb["form"] = "linear";
      jb["species"] = net.species[b.species].name;
      jb["gain"] = b.gain;
    }
    j["boundary"].push_back(jb);
  }
  return j;
}

Network network_from_json(const Json& j) {
  try {
    Network net;
    for (const auto& name : j.at("species")) net.add_species(name.get<std::string>());

    std::vector<int> complex_index;
    for (const auto& terms : j.at("complexes")) {
      Composition comp;
      for (const auto& t : terms) {
        int sp = net.find_species(t.at(0).get<std::string>());
        if (sp < 0) throw ModelError("complex references unknown species");
        comp.emplace_back(sp, t.at(1).get<int>());
      }
      std::sort(comp.begin(), comp.end());
      complex_index.push_back(net.intern_complex(comp));
    }

    for (const auto& jr : j.at("reactions")) {
      RateLaw law;
      const auto& jl = jr.at("law");
      std::string type = jl.at("type").get<std::string>();
      law.kind = type == "massaction" ? LawKind::MassAction : LawKind::MichaelisMenten;
      if (type != "massaction" && type != "mm") throw ModelError("unknown law type " + type);
      law.k_forward = jl.at("kf").get<double>();
      law.k_reverse = jl.value("kr", 0.0);
      if (jl.contains("km"))
        for (const auto& t : jl.at("km")) {
          int sp = net.find_species(t.at(0).get<std::string>());
          if (sp < 0) throw ModelError("Km references unknown species");
          law.km[sp] = t.at(1).get<double>();
        }
      bool reversible = jr.at("reversible").get<bool>();
      if (reversible != (law.k_reverse > 0.0))
        throw ModelError("reversible flag inconsistent with kr");
      net.add_reaction(jr.at("id").get<std::string>(),
                       complex_index.at(jr.at("substrate").get<int>()),
                       complex_index.at(jr.at("product").get<int>()), std::move(law));
    }

    for (const auto& jb : j.at("boundary")) {
      BoundaryFlux flux;
      flux.complex = jb.at("complex").get<int>();
      std::string form = jb.at("form").get<std::string>();
      if (form == "constant") {
        flux.form = BoundaryFlux::Form::Constant;
        flux.value = jb.at("value").get<double>();
      } else if (form == "linear") {
        flux.form = BoundaryFlux::Form::Linear;
        flux.species = net.find_species(jb.at("species").get<std::string>());
        if (flux.species < 0) throw ModelError("boundary references unknown species");
        flux.gain = jb.at("gain").get<double>();
      } else {
        throw ModelError("unknown boundary form " + form);
      }
      net.add_boundary(flux);
    }

    net.validate();
    return net;
  } catch (const Json::exception& e) {
    throw ModelError(std::string("malformed network JSON: ") + e.what());
  }
}

Network network_from_json_text(const std::string& text) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ModelError("malformed network JSON");
  return network_from_json(j);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << content;
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace kronred
