#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "trecom/graph.hpp"
#include "trecom/measures.hpp"

namespace trecom {

// Per-plan summary consumed by the analysis module.
struct EnsembleRecord {
  std::uint64_t plan_id = 0;
  std::uint64_t step = 0;
  int rung = -1;  // ladder level the state came from, -1 when not tempered
  std::vector<DistrictIndex> assignment;
  double J = 0.0;
  int splits = 0;
  std::vector<double> population;
  std::vector<double> bvap;
  std::vector<double> tvap;
  std::vector<std::vector<VoteCount>> votes;  // [election][district]
  std::vector<double> polsby_popper;

  int num_districts() const { return static_cast<int>(population.size()); }
  bool operator==(const EnsembleRecord&) const = default;
};

// District aggregates of `plan`; J and Polsby-Popper from `score`.
EnsembleRecord make_record(const RegionGraph& g, const Plan& plan, const ScoreBreakdown& score,
                           std::uint64_t plan_id, std::uint64_t step, int rung = -1);
// Same, scoring the plan itself.
EnsembleRecord make_record(const RegionGraph& g, const Plan& plan, std::uint64_t plan_id = 0);

// Run-length encoding over unit order: [[district, run length], ...].
std::vector<std::pair<DistrictIndex, std::uint32_t>> rle_encode(const std::vector<DistrictIndex>& assignment);
std::vector<DistrictIndex> rle_decode(const std::vector<std::pair<DistrictIndex, std::uint32_t>>& runs);

struct EnsembleHeader {
  std::vector<std::string> elections;
  std::vector<std::string> unit_ids;
  int num_districts = 0;
  std::string config_hash;
};

// JSON lines: a header object, then one record per line.
class EnsembleWriter {
 public:
  EnsembleWriter(const std::filesystem::path& path, const EnsembleHeader& header, bool append = false);
  void write(const EnsembleRecord& r);
  void flush();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

struct Ensemble {
  EnsembleHeader header;
  std::vector<EnsembleRecord> records;
};

Ensemble read_ensemble(const std::filesystem::path& path);
std::string serialize_record(const EnsembleRecord& r);
EnsembleRecord parse_record(const std::string& line, std::size_t num_elections);

// Truncates an ensemble file to its header plus the first `records` records
// (used when resuming from a checkpoint written before a crash).
void truncate_ensemble(const std::filesystem::path& path, std::size_t records);

// CSV row helpers for score tables: plan_id,J,splits,pp_rank1..pp_rankK
// with Polsby-Popper sorted ascending.
std::string score_csv_header(int num_districts);
std::string score_csv_row(const EnsembleRecord& r);

}  // namespace trecom
