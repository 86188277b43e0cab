#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "edubayes/irt.hpp"
#include "edubayes/response_matrix.hpp"

namespace edubayes {

struct RaschCalibConfig {
  int burn_in = 500;
  int retained = 2000;
  int thin = 1;
  double proposal_sd = 0.2;  // random-walk step for difficulty draws
  std::uint64_t seed = 0;
  ThetaGrid grid = ThetaGrid::standard_normal();

  void validate() const;
};

struct BetaSummary {
  std::string id;
  double mean = 0.0;
  double sd = 0.0;
  double acceptance = 0.0;       // Metropolis acceptance rate
  bool acceptance_warning = false;  // outside (0.05, 0.95)
};

struct RaschCalibResult {
  std::vector<BetaSummary> items;  // new items, data column order
};

// Alternates exact gridded proficiency draws with random-walk Metropolis
// moves on the new items' difficulties; old-item difficulties stay fixed.
// New items are the data columns not covered by `old_items`. `new_priors`
// gives a normal prior per new item (data column order); empty means a
// diffuse normal(0, 4) on each. With no old items this is the startup fit:
// every column is calibrated from scratch. When any old item exists, every
// examinee must have answered at least one.
RaschCalibResult calibrate_rasch_online(const ResponseMatrix& data,
                                        const std::vector<RaschItem>& old_items,
                                        const std::vector<BetaPrior>& new_priors,
                                        const RaschCalibConfig& config);

}  // namespace edubayes
