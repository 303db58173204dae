#include "ncd/distance.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ncd/errors.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace ncd {
namespace {

const CompressorBackend kIdentity = CompressorBackend::from_name("identity");
const CompressorBackend kGzip = CompressorBackend::from_name("gzip");

std::vector<std::string> strings_of_lengths(std::initializer_list<std::size_t> lens, char fill) {
  std::vector<std::string> out;
  for (auto n : lens) out.emplace_back(n, fill);
  return out;
}

TEST(JointLen, IdentityAddsOneSeparatorByte) {
  EXPECT_EQ(joint_len(kIdentity, std::string(10, 'a'), std::string(10, 'b')).bytes, 21u);
  EXPECT_EQ(joint_len(kIdentity, "", "").bytes, 1u);
}

TEST(JointLen, GzipExploitsRedundancyAcrossHalves) {
  std::string ab;
  for (int i = 0; i < 200; ++i) ab += "ab";
  const auto cx = compressed_len(kGzip, ab).bytes;
  EXPECT_EQ(cx, 27u);
  EXPECT_EQ(joint_len(kGzip, ab, ab).bytes, 32u);
  EXPECT_LT(joint_len(kGzip, ab, ab).bytes, 2 * cx);
}

TEST(Ncd, IdentityArithmetic) {
  EXPECT_DOUBLE_EQ(ncd(kIdentity, std::string(10, 'a'), std::string(10, 'b')).value, 1.1);
  EXPECT_THROW(ncd(kIdentity, "", ""), DomainError);
}

TEST(Ncd, FromLengthsFormula) {
  EXPECT_DOUBLE_EQ(ncd_from_lengths({115}, {112}, {177}), (177.0 - 112.0) / 115.0);
  EXPECT_THROW(ncd_from_lengths({0}, {0}, {1}), DomainError);
}

TEST(Ncd, SelfDistanceBelowRandomDistance) {
  std::mt19937_64 rng(42);
  for (const auto& x : {testing::kSentence1, testing::kSentence2, testing::kSentence3}) {
    const std::string r = testing::random_text(rng, x.size(), "abcdefghijklmnopqrstuvwxyz ,.'0123456789");
    const double self = ncd(kGzip, x, x).value;
    EXPECT_LT(self, 0.5);
    EXPECT_LT(self, ncd(kGzip, x, r).value);
  }
}

TEST(Ncd, SameTopicSavesMoreBytes) {
  const auto c1 = compressed_len(kGzip, testing::kSentence1).bytes;
  const auto c12 = joint_len(kGzip, testing::kSentence1, testing::kSentence2).bytes;
  const auto c13 = joint_len(kGzip, testing::kSentence1, testing::kSentence3).bytes;
  EXPECT_EQ(c1, 115u);
  EXPECT_EQ(c12, 177u);
  EXPECT_EQ(c13, 191u);
  EXPECT_LT(c12 - c1, c13 - c1);
}

TEST(Ncd, IdentityClosedFormOnRandomLengths) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t a = 1 + rng() % 300;
    const std::size_t b = 1 + rng() % 300;
    const std::string x = testing::random_text(rng, a, "xyz");
    const std::string y = testing::random_text(rng, b, "xyz");
    EXPECT_DOUBLE_EQ(ncd(kIdentity, x, y).value, testing::identity_ncd(a, b));
  }
}

TEST(DistanceMatrix, IdentityTwoByTwo) {
  auto test = strings_of_lengths({4, 6}, 't');
  auto train = strings_of_lengths({4, 8}, 'r');
  auto m = distance_matrix(kIdentity, std::span<const std::string>(test), std::span<const std::string>(train));
  ASSERT_EQ(m.rows(), 2u);
  ASSERT_EQ(m.cols(), 2u);
  EXPECT_DOUBLE_EQ(m.at(0, 0), 1.25);
  EXPECT_DOUBLE_EQ(m.at(0, 1), 1.125);
  EXPECT_DOUBLE_EQ(m.at(1, 0), 7.0 / 6.0);
  EXPECT_NEAR(m.at(1, 0), 1.1667, 1e-4);
  EXPECT_DOUBLE_EQ(m.at(1, 1), 1.125);
  EXPECT_EQ(m.values().size(), 4u);
  EXPECT_EQ(m.backend_name(), "identity");
}

TEST(DistanceMatrix, GzipFixtureMatchesReferenceAndPairwiseCalls) {
  std::vector<std::string> test(testing::kMatrixTest.begin(), testing::kMatrixTest.end());
  std::vector<std::string> train(testing::kMatrixTrain.begin(), testing::kMatrixTrain.end());
  auto m = distance_matrix(kGzip, std::span<const std::string>(test), std::span<const std::string>(train), 2);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(m.test_lengths()[i].bytes, testing::kGzipTestLengths[i]);
    EXPECT_EQ(m.train_lengths()[i].bytes, testing::kGzipTrainLengths[i]);
    for (std::size_t j = 0; j < 3; ++j) {
      EXPECT_DOUBLE_EQ(m.at(i, j), testing::kGzipMatrix[i][j]) << i << "," << j;
      EXPECT_EQ(m.at(i, j), ncd(kGzip, test[i], train[j]).value);
      const double redo = ncd_from_lengths(m.test_lengths()[i], m.train_lengths()[j], joint_len(kGzip, test[i], train[j]));
      EXPECT_EQ(m.at(i, j), redo);
      EXPECT_GT(m.at(i, j), -0.1);
      EXPECT_LT(m.at(i, j), 1.2);
    }
  }
}

TEST(DistanceMatrix, WorkerCountDoesNotChangeValues) {
  std::mt19937_64 rng(9);
  std::vector<std::string> test, train;
  for (int i = 0; i < 7; ++i) test.push_back(testing::random_text(rng, 20 + rng() % 80, "abc de"));
  for (int i = 0; i < 11; ++i) train.push_back(testing::random_text(rng, 20 + rng() % 80, "abc de"));
  for (const auto& name : {"gzip", "bz2", "lzma", "zstd", "identity"}) {
    auto b = CompressorBackend::from_name(name);
    auto one = distance_matrix(b, std::span<const std::string>(test), std::span<const std::string>(train), 1);
    auto eight = distance_matrix(b, std::span<const std::string>(test), std::span<const std::string>(train), 8);
    EXPECT_TRUE(one == eight) << name;
  }
}

TEST(DistanceMatrix, IdentityClosedFormOnRandomShapes) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::string> test, train;
    const std::size_t r = 1 + rng() % 5, c = 1 + rng() % 5;
    for (std::size_t i = 0; i < r; ++i) test.push_back(std::string(1 + rng() % 50, 'q'));
    for (std::size_t j = 0; j < c; ++j) train.push_back(std::string(1 + rng() % 50, 'w'));
    auto m = distance_matrix(kIdentity, std::span<const std::string>(test), std::span<const std::string>(train), 3);
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = 0; j < c; ++j) {
        EXPECT_DOUBLE_EQ(m.at(i, j), testing::identity_ncd(test[i].size(), train[j].size()));
      }
    }
  }
}

TEST(DistanceMatrix, DocumentOverloadMatchesStrings) {
  std::vector<Document> test, train;
  for (std::size_t i = 0; i < 3; ++i) {
    test.push_back(Document{i, testing::kMatrixTest[i], std::nullopt});
    train.push_back(Document{i, testing::kMatrixTrain[i], LabelId{0}});
  }
  auto m = distance_matrix(kGzip, std::span<const Document>(test), std::span<const Document>(train));
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(m.at(i, j), testing::kGzipMatrix[i][j]);
  }
}

TEST(DistanceMatrix, RejectsEmptyInputsAndZeroWorkers) {
  std::vector<std::string> none;
  std::vector<std::string> one = {"a"};
  EXPECT_THROW(distance_matrix(kGzip, std::span<const std::string>(none), std::span<const std::string>(one)),
               ArgumentError);
  EXPECT_THROW(distance_matrix(kGzip, std::span<const std::string>(one), std::span<const std::string>(none)),
               ArgumentError);
  EXPECT_THROW(distance_matrix(kGzip, std::span<const std::string>(one), std::span<const std::string>(one), 0),
               ArgumentError);
}

TEST(DistanceMatrix, ZeroDenominatorCarriesCellCoordinates) {
  std::vector<std::string> test = {"a", ""};
  std::vector<std::string> train = {"b", ""};
  try {
    distance_matrix(kIdentity, std::span<const std::string>(test), std::span<const std::string>(train), 4);
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("(1, 1)"), std::string::npos) << e.what();
  }
}

TEST(MatrixIo, BinaryRoundTrip) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.05, 1.1);
  std::vector<double> v(6 * 4);
  for (auto& x : v) x = u(rng);
  DistanceMatrix m(6, 4, v, "gzip");
  std::stringstream buf;
  write_matrix_binary(m, buf);
  const std::string bytes = buf.str();
  ASSERT_EQ(bytes.size(), 4u + 4u + 8u + 8u + 8u * 24u);
  EXPECT_EQ(bytes.substr(0, 4), "NCDM");
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 1u);
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 6u);
  EXPECT_EQ(static_cast<unsigned char>(bytes[16]), 4u);
  auto back = read_matrix_binary(buf);
  EXPECT_TRUE(back == m);
}

TEST(MatrixIo, BinaryRejectsCorruptInput) {
  DistanceMatrix m(1, 2, {0.5, 0.25});
  std::stringstream good;
  write_matrix_binary(m, good);
  std::string bytes = good.str();

  std::stringstream bad_magic("XXXX" + bytes.substr(4));
  EXPECT_THROW(read_matrix_binary(bad_magic), DataError);

  std::string wrong_version = bytes;
  wrong_version[4] = 2;
  std::stringstream v2(wrong_version);
  EXPECT_THROW(read_matrix_binary(v2), DataError);

  std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
  EXPECT_THROW(read_matrix_binary(truncated), DataError);

  std::stringstream trailing(bytes + "z");
  EXPECT_THROW(read_matrix_binary(trailing), DataError);
}

TEST(MatrixIo, CsvHeaderAndRows) {
  DistanceMatrix m(2, 3, {0.5, 0.25, 1.0, 0.125, 0.0, 1.1});
  std::ostringstream out;
  write_matrix_csv(m, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "test_index,0,1,2");
  std::getline(in, line);
  EXPECT_EQ(line, "0,0.5,0.25,1");
  std::getline(in, line);
  EXPECT_EQ(line.substr(0, 8), "1,0.125,");
  EXPECT_NE(line.find("1.1000000000000001"), std::string::npos);
}

}  // namespace
}  // namespace ncd
