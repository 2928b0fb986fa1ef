// Copyright (c) 2026 The prosodiff Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PROSODIFF_SVG_H_
#define PROSODIFF_SVG_H_

#include <string>
#include <vector>

namespace prosodiff {

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

std::string LineChartSvg(const std::string& title, const std::string& x_label,
                         const std::string& y_label,
                         const std::vector<PlotSeries>& series);

// One group of bars per category; series[i].y[j] is the bar of series i in
// category j.
std::string BarChartSvg(const std::string& title,
                        const std::vector<std::string>& categories,
                        const std::vector<PlotSeries>& series);

}  // namespace prosodiff

#endif  // PROSODIFF_SVG_H_
