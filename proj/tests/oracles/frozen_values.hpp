#pragma once

// Generated by gen_frozen.py. Do not edit.

#include <cstdint>

namespace frozen {

inline constexpr std::uint64_t kRngNext42[] = {1546998764402558742ULL, 6990951692964543102ULL, 12544586762248559009ULL, 17057574109182124193ULL};
inline constexpr double kRngUniform42[] = {0.9918039142821028, 0.7697394604342425, 0.7192585778779156, 0.8500084439109727};
inline constexpr std::uint64_t kRngBelow42[] = {8, 5, 9, 3, 0, 2};
inline constexpr int kShuffle3[] = {6, 7, 3, 4, 5, 2, 0, 9, 1, 8};
inline constexpr double kLstmStepPlainC[] = {0.6420330440991173, 0.051744909153359886, 0.43727176008939034, 0.09662393209613979};
inline constexpr double kLstmStepPlainY[] = {0.3147101918605617, 0.02626559813355471, 0.18672970559338387, 0.031326938911838194};
inline constexpr double kLstmStepPeepC[] = {0.143773489684947, 0.24006418173397057, -0.1532629323477463, -0.1520539357709108};
inline constexpr double kLstmStepPeepY[] = {0.0950792426514607, 0.058064141659368566, -0.09235813919569012, -0.0630962784658801};
inline constexpr int kStackPlainIds[] = {5, 0, 1, 0, 4, 5};
inline constexpr int kStackPlainTags[] = {0, 1, 2, 0, 2, 3};
inline constexpr double kStackPlainProbs[] = {0.32787671005176594, 0.2245622675684096, 0.24246623266345527, 0.20509478971636927, 0.32884522476422, 0.2246728077288576, 0.2414646167311019, 0.2050173507758206, 0.32913193520688977, 0.22469224515230032, 0.24115348799441444, 0.20502233164639533, 0.3290441541605808, 0.22463889572604873, 0.24126121412923635, 0.205055735984134, 0.3285157454338882, 0.22465031724138856, 0.24158743281568484, 0.2052465045090384, 0.32678330676445333, 0.2253085438356101, 0.24163408279205675, 0.20627406660787984};
inline constexpr double kStackPlainLoss = 1.3568643586045503;
inline constexpr int kStackPeepIds[] = {4, 3, 0, 2, 3, 5};
inline constexpr int kStackPeepTags[] = {0, 1, 2, 3, 0, 2};
inline constexpr double kStackPeepProbs[] = {0.23505202385019575, 0.366587868835, 0.14407614857216558, 0.25428395874263865, 0.23751108251924577, 0.3639021172099065, 0.1435157188816911, 0.25507108138915663, 0.2394078485949916, 0.36211688157529, 0.14301025591592914, 0.2554650139137892, 0.24050301803043594, 0.3614339762973668, 0.14241090821894667, 0.25565209745325046, 0.24077639156442246, 0.3625108230936102, 0.14139277360631347, 0.25532001173565383, 0.23991435706141956, 0.3680257939957792, 0.13917666315717828, 0.25288318578562285};
inline constexpr double kStackPeepLoss = 1.5272488765203323;
inline constexpr double kCreateFirstValues[] = {0.02005764821796896, 0.043896559871560305, 0.015135628638004994, 0.0, -0.041242626843585574, 0.04832697917254254, 0.0, 0.02729064010318413, 0.0013481733683966546, 1.0, 0.043623711793983735, 0.016635474925409868, 0.0, 0.025058997271554185, 0.00811417962131702, 0.0, 0.03842132058932354, -0.048075018626461144, 0.0, 0.008127730123031685, -0.049738429586206806, 1.0, -0.018347893098834677, 0.04056922408376225, 0.0, 0.01733525857790924, -0.04801263693436958, 0.028849768467187287, 0.0, -0.0047085535985868735, -0.009510588920638809, 0.0, -0.04047804834540711, -0.03794436032953206, 1.0, -0.049146510204067, 0.0035215899900043926, 0.0, -0.02281431176382505, -0.0029655518196376796, 0.0, -0.03744224747826356, -0.018783850565133455, 0.0, 0.03392405602552362, -0.01428138787454164, 1.0, 0.013311126137943509, 0.008264756770630632, 0.0, 0.048752907124589455, 0.0, 0.04161883359043798, 0.0};
inline constexpr double kDropoutMask5[] = {2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 2.0, 2.0, 0.0, 2.0, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0};

}  // namespace frozen
