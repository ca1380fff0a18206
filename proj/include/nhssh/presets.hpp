#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "nhssh/model.hpp"

namespace nhssh {

/// A named parameter set with the chain it is shown on.
struct FigurePreset {
  std::string id;
  std::string summary;
  HoppingSet model;
  ChainSpec chain;
};

inline const std::vector<FigurePreset>& figure_presets() {
  static const std::vector<FigurePreset> all = [] {
    const ChainSpec even{20, Parity::Even, Boundary::OBC};
    const ChainSpec odd{20, Parity::Odd, Boundary::OBC};
    const double a = 1.1 + 2.0 / 3.0, b = 1.1 - 2.0 / 3.0;
    return std::vector<FigurePreset>{
        {"fig1", "SSH, nu-bar = 1, r = 2: both edge states on the right",
         HoppingSet::ssh(1, 4, 3, 3), even},
        {"fig2", "type-1 QH, tbar = (1/4, 2, 2), r = 1/2: three left + one right",
         HoppingSet::ext1(0.5, 0.125, 2, 2, 4, 1), even},
        {"fig3", "type-1 QH, tbar = (2, 5, 1), r = 4: both edge states on the right",
         HoppingSet::ext1(0.5, 8, 5, 5, 0.25, 4), even},
        {"fig4", "type-1 general, tbar = (3, 2, 3/2): trivial, no edge states",
         HoppingSet::ext1(4.5, 2, 2, 2, 1, 2.25), even},
        {"fig5", "type-1 general, tbar = (1, 10/3, 3/2): one left + one right",
         HoppingSet::ext1(1, 1, 10.0 / 3.0, 10.0 / 3.0, 0.75, 3), even},
        {"fig6", "type-1 general, tbar = (1, 3, sqrt 14): two left + two right",
         HoppingSet::ext1(1, 1, 3, 3, 3.5, 4), even},
        {"fig7", "type-2 QH, tbar = (4, 1/2, 5), r = 1/2: both edge states on the left",
         HoppingSet::ext2(4, 4, 1, 0.25, 10, 2.5), even},
        {"fig8", "type-1 QH on 41 sites (fig2 amplitudes): three left states, one exact zero",
         HoppingSet::ext1(0.5, 0.125, 2, 2, 4, 1), odd},
        {"fig9", "type-2 general, tbar = (2, 3, 3/2): one left + one right",
         HoppingSet::ext2(2, 2, 4.5, 2, 1, 2.25), even},
        {"fig10", "type-2 general, tbar = (3, 1, sqrt 14): one left + one right",
         HoppingSet::ext2(3, 3, 1, 1, 3.5, 4), even},
        {"appC1", "type-2 literature case 1, nu_E = (1, 0)", HoppingSet::ext2(a, b, 1, 1, 0.2, 0.2), even},
        {"appC2", "type-2 literature case 2 (negative amplitudes), nu_E = (0, -1)",
         HoppingSet::ext2(-1.1 + 2.0 / 3.0, -1.1 - 2.0 / 3.0, 1, 1, 0.2, 0.2), even},
        {"appC3", "type-2 literature case 3, nu_E = (1, -1)", HoppingSet::ext2(0.3, 0.3, a, b, 0.2, 0.2), even},
        {"appC4", "type-2 literature case 4, nu_E = (1, -1)", HoppingSet::ext2(0.3, 0.3, b, a, 0.2, 0.2), even},
    };
  }();
  return all;
}

inline const FigurePreset& find_preset(std::string_view id) {
  for (const auto& p : figure_presets())
    if (p.id == id) return p;
  throw Error(Errc::ConfigError, "unknown preset '" + std::string(id) + "'");
}

}  // namespace nhssh
