#pragma once

#include <span>

#include "urcminer/models.hpp"

namespace urcminer::detail {

void logreg_proba(const LogRegParams& p, std::span<const double> row, std::span<double> out);
void gnb_proba(const GnbParams& p, std::span<const double> row, std::span<double> out);
void forest_proba(const ForestParams& p, std::span<const double> row, std::span<double> out);

}  // namespace urcminer::detail
