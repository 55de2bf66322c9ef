// Shared test fixtures: the December four-fund price block, the dividend
// worked example, the quarterly toy array, and the published moment tables
// they are checked against.

#pragma once

#include <array>
#include <string>
#include <vector>

#include "mvledger/core.hpp"
#include "mvledger/market_data.hpp"

namespace fixtures {

inline constexpr int kDecRows = 22;

inline const std::array<const char*, kDecRows> kDecDates = {
    "2014-12-01", "2014-12-02", "2014-12-03", "2014-12-04", "2014-12-05", "2014-12-08",
    "2014-12-09", "2014-12-10", "2014-12-11", "2014-12-12", "2014-12-15", "2014-12-16",
    "2014-12-17", "2014-12-18", "2014-12-19", "2014-12-22", "2014-12-23", "2014-12-24",
    "2014-12-26", "2014-12-29", "2014-12-30", "2014-12-31"};

inline constexpr std::array<double, kDecRows> kDecFBT = {
    145.736, 147.918, 148.034, 147.123, 148.150, 151.214, 151.807, 148.699,
    148.786, 146.878, 142.657, 140.807, 145.851, 150.737, 152.212, 150.463,
    143.842, 145.968, 149.554, 150.017, 148.151, 147.544};

inline constexpr std::array<double, kDecRows> kDecXBI = {
    135.477, 139.052, 139.184, 138.121, 140.580, 141.417, 145.504, 142.379,
    142.720, 142.480, 136.400, 135.609, 142.076, 146.628, 147.990, 146.886,
    139.313, 141.988, 145.261, 145.790, 144.258, 144.973};

inline constexpr std::array<double, kDecRows> kDecUIP = {
    143.171, 145.702, 145.821, 144.873, 146.258, 148.765, 150.231, 147.119,
    147.269, 145.778, 141.093, 139.507, 144.907, 149.710, 151.156, 149.569,
    142.710, 144.973, 148.481, 148.960, 147.178, 146.901};

inline constexpr std::array<double, kDecRows> kDecCRP = {
    143.490, 146.048, 146.169, 145.215, 146.622, 149.114, 150.630, 147.508,
    147.661, 146.179, 141.469, 139.888, 145.314, 150.129, 151.579, 149.990,
    143.107, 145.380, 148.897, 149.378, 147.592, 147.321};

/// December block as a four-column panel CSV (3 decimals, as published).
inline std::string december_panel_csv() {
  std::string out = "date,FBT,XBI,UIP,CRP\n";
  for (int i = 0; i < kDecRows; ++i) {
    out += std::string(kDecDates[i]) + "," + mvledger::format_fixed(kDecFBT[i], 3) + "," +
           mvledger::format_fixed(kDecXBI[i], 3) + "," + mvledger::format_fixed(kDecUIP[i], 3) +
           "," + mvledger::format_fixed(kDecCRP[i], 3) + "\n";
  }
  return out;
}

/// Two-column FBT/XBI December panel (for portfolio path replays).
inline std::string december_two_fund_csv() {
  std::string out = "date,FBT,XBI\n";
  for (int i = 0; i < kDecRows; ++i)
    out += std::string(kDecDates[i]) + "," + mvledger::format_fixed(kDecFBT[i], 3) + "," +
           mvledger::format_fixed(kDecXBI[i], 3) + "\n";
  return out;
}

inline mvledger::PricePanel december_panel() {
  return mvledger::read_panel_csv(december_panel_csv());
}

// Dividend worked example: closing prices on the printed skeleton dates plus
// the four 2014 distributions, and the published adjusted outputs.

inline constexpr const char* kDivQuotesCsv =
    "Date,Close\n"
    "2013-12-31,130.20\n"
    "2014-03-20,160.17\n"
    "2014-03-21,153.15\n"
    "2014-06-19,153.32\n"
    "2014-06-20,153.42\n"
    "2014-09-18,159.94\n"
    "2014-09-19,158.27\n"
    "2014-12-18,189.08\n"
    "2014-12-19,190.34\n"
    "2014-12-31,186.46\n";

inline constexpr const char* kDivEventsCsv =
    "ex_date,amount\n"
    "2014-03-21,0.333023\n"
    "2014-06-20,0.616142\n"
    "2014-09-19,0.562774\n"
    "2014-12-19,0.490997\n";

inline constexpr std::array<double, 10> kDivCloses = {130.20, 160.17, 153.15, 153.32, 153.42,
                                                      159.94, 158.27, 189.08, 190.34, 186.46};

inline constexpr std::array<double, 10> kDivAdjusted = {100.000, 123.018, 117.872, 118.003,
                                                        118.556, 123.594, 122.736, 146.628,
                                                        147.990, 144.973};

inline constexpr double kDivShareFactorMar21 = 0.769649;

/// Quarterly toy price path: +50%, -67%, +200%, -17%.
inline constexpr std::array<double, 5> kQuarterly = {100.0, 150.0, 50.0, 150.0, 125.0};

// Published five-fund annualized moments (traditional model, full 2014).

inline const std::vector<std::string> kMomentLabels5 = {"FBT", "XBI", "UIP", "UIP2", "UIP3"};

inline constexpr std::array<double, 5> kMomentE5 = {0.4245, 0.4324, 0.4235, 0.4244, 0.4274};
inline constexpr std::array<double, 5> kMomentSigma5 = {0.2656, 0.3491, 0.2777, 0.2963, 0.3203};

inline constexpr std::array<std::array<double, 5>, 5> kMomentV5 = {{
    {0.0705, 0.0804, 0.0729, 0.0753, 0.0778},
    {0.0804, 0.1219, 0.0905, 0.1008, 0.1112},
    {0.0729, 0.0905, 0.0771, 0.0815, 0.0859},
    {0.0753, 0.1008, 0.0815, 0.0878, 0.0942},
    {0.0778, 0.1112, 0.0859, 0.0942, 0.1026},
}};

// Published seven-fund linear-model table (full 2014).

inline const std::vector<std::string> kLinearLabels7 = {"FBT",  "XBI",  "UIP", "UIP2",
                                                        "UIP3", "ZNS", "CRP"};

inline constexpr std::array<double, 7> kLinearE07 = {0.4754, 0.4497, 0.4690, 0.4626,
                                                     0.4562, 0.4820, 0.4732};
inline constexpr std::array<double, 7> kLinearSigma07 = {0.3205, 0.4050, 0.3323, 0.3510,
                                                         0.3756, 0.3163, 0.3334};

inline constexpr std::array<std::array<double, 7>, 7> kLinearV07 = {{
    {0.1027, 0.1131, 0.1053, 0.1079, 0.1105, 0.1001, 0.1056},
    {0.1131, 0.1641, 0.1258, 0.1386, 0.1513, 0.1001, 0.1264},
    {0.1053, 0.1258, 0.1104, 0.1156, 0.1207, 0.1001, 0.1108},
    {0.1079, 0.1386, 0.1156, 0.1232, 0.1309, 0.1001, 0.1160},
    {0.1105, 0.1513, 0.1207, 0.1309, 0.1411, 0.1001, 0.1212},
    {0.1001, 0.1001, 0.1001, 0.1001, 0.1001, 0.1001, 0.1003},
    {0.1056, 0.1264, 0.1108, 0.1160, 0.1212, 0.1003, 0.1112},
}};

// Published orthonormal coordinates (x, y, z rows) of the seven funds.

inline constexpr std::array<double, 7> kZtildeX = {-0.0514, -0.2530, -0.1018, -0.1522,
                                                   -0.2026, 0.0,     -0.1030};
inline constexpr std::array<double, 7> kZtildeY = {0.3163, 0.3163, 0.3163, 0.3163,
                                                   0.3163, 0.3163, 0.3171};
inline constexpr std::array<double, 7> kZtildeZ = {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0024};

/// Long-short overlay weights chosen to zero the first risk coordinate.
inline constexpr double kZnsLong = 1.25515;
inline constexpr double kZnsShort = -0.25515;

}  // namespace fixtures
