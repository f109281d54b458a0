// Knowledge-base file inspection: dump, load round-trip, and queries.
// Query syntax: attribute=value pairs (class, layer, kind, from, to)
// plus at most one criterion (closest_to=x,y,z or
// within_fov=x,y,yaw,fov,range).

#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "hiper/kb/knowledge_base.hpp"

namespace {

hiper::kb::Query parse_query(const std::vector<std::string>& terms) {
  hiper::kb::Query q;
  for (const auto& term : terms) {
    const auto eq = term.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("bad query term: " + term);
    const std::string key = term.substr(0, eq);
    const std::string value = term.substr(eq + 1);
    if (key == "class") {
      q.class_label = value;
    } else if (key == "layer") {
      const auto layer = hiper::kb::layer_from_string(value);
      if (!layer) throw std::invalid_argument("unknown layer: " + value);
      q.layer = layer;
    } else if (key == "kind") {
      const auto kind = hiper::kb::kind_from_string(value);
      if (!kind) throw std::invalid_argument("unknown kind: " + value);
      q.kind = kind;
    } else if (key == "from") {
      q.time_from = std::stod(value);
    } else if (key == "to") {
      q.time_to = std::stod(value);
    } else if (key == "closest_to" || key == "within_fov") {
      if (q.criterion != hiper::kb::Query::Criterion::none)
        throw std::invalid_argument("a query takes at most one criterion");
      std::vector<double> nums;
      std::stringstream ss(value);
      std::string item;
      while (std::getline(ss, item, ',')) nums.push_back(std::stod(item));
      if (key == "closest_to") {
        if (nums.size() != 3) throw std::invalid_argument("closest_to wants x,y,z");
        q.criterion = hiper::kb::Query::Criterion::closest_to;
        q.point = {nums[0], nums[1], nums[2]};
      } else {
        if (nums.size() != 5) throw std::invalid_argument("within_fov wants x,y,yaw,fov,range");
        q.criterion = hiper::kb::Query::Criterion::within_fov;
        q.fov_pose = {nums[0], nums[1], nums[2]};
        q.fov_angle = nums[3];
        q.fov_range = nums[4];
      }
    } else {
      throw std::invalid_argument("unknown query key: " + key);
    }
  }
  return q;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"knowledge base store"};
  app.require_subcommand(1);

  std::string kb_path;
  std::string out_path;
  std::vector<std::string> terms;

  auto* dump = app.add_subcommand("dump", "print every document record");
  dump->add_option("--kb", kb_path, "kb file")->required();

  auto* load = app.add_subcommand("load", "load a kb file and re-save it");
  load->add_option("--kb", kb_path, "kb file")->required();
  load->add_option("--out", out_path, "output kb file")->required();

  auto* query = app.add_subcommand("query", "filter documents");
  query->add_option("--kb", kb_path, "kb file")->required();
  query->add_option("terms", terms, "attribute=value pairs plus one criterion");

  CLI11_PARSE(app, argc, argv);

  try {
    const auto store = hiper::kb::KnowledgeBase::load(kb_path);
    if (dump->parsed()) {
      for (const auto& doc : store.documents())
        std::cout << hiper::kb::document_to_record(doc) << "\n";
    } else if (load->parsed()) {
      store.save(out_path);
      std::cout << "saved " << store.size() << " documents to " << out_path << "\n";
    } else if (query->parsed()) {
      const auto results = store.query(parse_query(terms));
      for (const auto& doc : results) std::cout << hiper::kb::document_to_record(doc) << "\n";
      std::cerr << results.size() << " documents\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "kb: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
