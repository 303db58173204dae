#pragma once

#include <array>
#include <string>

namespace ncd::testing {

// Three news sentences: the first two share a topic, the third does not.
inline const std::string kSentence1 =
    "Japan's Seiko Epson Corp. said Wednesday it has developed a 12-gram flying microrobot, the world's lightest.";
inline const std::string kSentence2 =
    "The latest tiny flying robot that could help in search and rescue or surveillance has been unveiled in Japan.";
inline const std::string kSentence3 =
    "Michael Phelps won the gold medal in the 400 individual medley and set a world record in a time of 4 minutes "
    "8.26 seconds.";

inline const std::array<std::string, 3> kMatrixTest = {
    "The quick brown fox jumps over the lazy dog.",
    "Stocks rallied on Wall Street as investors cheered earnings.",
    "The team won the championship game in overtime.",
};
inline const std::array<std::string, 3> kMatrixTrain = {
    "A quick brown dog jumps over the lazy fox.",
    "Wall Street stocks fell as earnings disappointed investors.",
    "The home team lost the final game of the season.",
};

// gzip level 9 NCD values for kMatrixTest x kMatrixTrain, computed with
// CPython's gzip module (mtime=0) and the same arithmetic.
inline constexpr double kGzipMatrix[3][3] = {
    {0.19047619047619047, 0.5789473684210527, 0.5079365079365079},
    {0.5921052631578947, 0.3026315789473684, 0.5131578947368421},
    {0.5384615384615384, 0.5, 0.4461538461538462},
};
inline constexpr std::size_t kGzipTestLengths[3] = {63, 76, 65};
inline constexpr std::size_t kGzipTrainLengths[3] = {62, 76, 62};

}  // namespace ncd::testing
