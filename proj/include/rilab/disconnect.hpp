#pragma once
// Disconnection experiments on blow-up pairs: does the vacant set at level u
// still connect the blown-up target A_N to the concentric shell S_N inside the
// observation window? Connectivity is nearest-neighbor through vacant window
// sites only; vacant sites outside the window are ignored. A fully covered
// target disconnects by convention (a vacant path has nowhere to start).

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "rilab/blowup.hpp"
#include "rilab/equilibrium.hpp"
#include "rilab/green.hpp"
#include "rilab/sampler.hpp"

namespace rilab {

struct DisconnectionResult {
  bool occurred = false;
  double u = 0;
  int32_t N = 1;
  double M = 2;
  // Vacant sites reachable from the vacant part of A_N (0 when covered).
  uint64_t vacant_cluster_size = 0;
  // Certificate when occurred: the occupied sites sealing that cluster, i.e.
  // covered A_N sites plus the occupied outer boundary of the cluster. Every
  // window path from A_N to the shell passes through one of them.
  std::vector<LatticePoint> witness;
};

DisconnectionResult check_disconnection(const std::vector<LatticePoint>& vacant,
                                        const BlowUpPair& pair);

struct DisconnectParams {
  double u = 1.0;
  int32_t N = 4;
  double M = 2.0;
  CompactSetSpec target = CompactSetSpec::make_ball(3, {}, 1.0);
  int64_t rho = 0;          // walk truncation radius; 0 picks 4 * shell radius
  uint64_t min_hits = 100;  // conditioning: accepted replicas required
  uint64_t max_replicas = 200000;  // conditioning: total replica budget
};

struct ReplicaRecord {
  uint64_t replica = 0;
  uint64_t seed = 0;  // derived per-replica stream seed
  bool occurred = false;
  double target_occupation = 0;  // sum of the field over A_N
};

struct DisconnectionEstimate {
  double estimate = 0;  // fraction of replicas that disconnected
  double se = 0;        // binomial standard error
  uint64_t replicas = 0;
  uint64_t occurrences = 0;
  double cap_window = 0;
  std::vector<ReplicaRecord> records;
};

DisconnectionEstimate estimate_disconnection_probability(const DisconnectParams& params,
                                                         uint64_t replicas, uint64_t seed,
                                                         const GreenTable& G);

// Site-by-site occupation statistics conditioned on an event of the replica.
struct ConditionalProfile {
  std::vector<LatticePoint> sites;  // window, sorted
  std::vector<double> cond_mean;
  std::vector<double> cond_se;
  std::vector<double> uncond_mean;
  std::vector<double> uncond_se;
  uint64_t replicas = 0;  // replicas consumed
  uint64_t hits = 0;      // replicas satisfying the event
  // Mean over A_N of (conditional occupation - u): positive when the event
  // pushes mass onto the target, with its standard error.
  double summary = 0;
  double summary_se = 0;
  int32_t N = 1;
  double u = 0;
};

using ReplicaEvent = std::function<bool(const DisconnectionResult&, const OccupationField&)>;

// Rejection sampling of the conditional law. The default event is
// disconnection. Throws std::invalid_argument at u = 0 (the default event is
// then null) and std::runtime_error("conditioning too rare") when min_hits is
// not reached within max_replicas.
ConditionalProfile conditional_occupation_profile(const DisconnectParams& params, uint64_t seed,
                                                  const GreenTable& G,
                                                  const ReplicaEvent& event = {});

void write_replica_csv(const DisconnectionEstimate& est, std::ostream& os);
void write_profile_csv(const ConditionalProfile& prof, std::ostream& os);

}  // namespace rilab
