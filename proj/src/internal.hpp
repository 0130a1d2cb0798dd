#pragma once

#include <span>

#include "statusrank/network.hpp"
#include "statusrank/rank_model.hpp"

namespace statusrank::detail {

/// Log-rate terms of edges incident to u, plus those incident to v not touching u.
double incident_log_terms(const DirectedNetwork& net, std::span<const int> ranks, const RateTables& rates,
                          NodeIndex u, NodeIndex v);

}  // namespace statusrank::detail
