#include <gtest/gtest.h>

#include <random>

#include "hepflow/rio/rio.hpp"
#include "random_objects.hpp"

using namespace hepflow;
using namespace hepflow::rio;

TEST(Rio, EmptyHist1DPayloadIs148Bytes) {
  // 4 + 8 + 8 + 3 * (8 * 5) + 8
  EXPECT_EQ(encode_payload(hbook::Hist1D(1, 0, 1)).size(), 148u);
}

TEST(Rio, RecordHeaderLayout) {
  Writer w;
  w.write("h", hbook::Hist1D(1, 0, 1));
  const auto& b = w.image();
  ASSERT_EQ(b.size(), 4u + 4 + 1 + 4 + 4 + 8 + 148 + 4);
  EXPECT_EQ(std::string(b.begin(), b.begin() + 4), "RIO1");
  EXPECT_EQ(b[4], 1);  // name_len
  EXPECT_EQ(b[5] | b[6] | b[7], 0);
  EXPECT_EQ(b[8], 'h');
  EXPECT_EQ(b[9], 1);   // type tag
  EXPECT_EQ(b[13], 1);  // version
  EXPECT_EQ(b[17], 148);
  EXPECT_EQ(b[18], 0);
  // lo = 0.0, hi = 1.0 after n_bins
  EXPECT_EQ(b[25 + 4 + 15], 0x3F);
  EXPECT_EQ(b[25 + 4 + 14], 0xF0);
}

TEST(Rio, RoundTripRandomObjects) {
  std::mt19937_64 gen(1234);
  for (int trial = 0; trial < 200; ++trial) {
    Writer w;
    std::vector<std::pair<std::string, Object>> objs;
    for (int k = 0; k < 3; ++k) {
      objs.emplace_back("obj" + std::to_string(k), testing_util::random_object(gen));
      w.write(objs.back().first, objs.back().second);
    }
    Reader r(w.image());
    auto back = r.read_all();
    ASSERT_EQ(back.size(), objs.size());
    for (std::size_t k = 0; k < objs.size(); ++k) {
      EXPECT_EQ(back[k].name, objs[k].first);
      EXPECT_TRUE(back[k].object == objs[k].second);
    }
  }
}

TEST(Rio, EncodingIsDeterministic) {
  std::mt19937_64 g1(99), g2(99);
  for (int i = 0; i < 50; ++i) {
    Writer a, b;
    a.write("x", testing_util::random_object(g1));
    b.write("x", testing_util::random_object(g2));
    EXPECT_EQ(a.image(), b.image());
  }
}

TEST(Rio, PayloadByteFlipsAreDetected) {
  std::mt19937_64 gen(77);
  Writer w;
  w.write("h", testing_util::random_hist1d(gen));
  const auto image = w.image();
  const std::size_t payload_begin = 4 + 4 + 1 + 4 + 4 + 8;
  const std::size_t payload_end = image.size() - 4;
  for (std::size_t pos = payload_begin; pos < payload_end; ++pos) {
    auto bad = image;
    bad[pos] ^= 0x5A;
    Reader r(bad);
    EXPECT_THROW(r.next(), CrcMismatch) << "offset " << pos;
  }
}

TEST(Rio, HeaderCorruptions) {
  Writer w;
  w.write("h", hbook::Hist1D(3, 0, 1));
  auto bad_magic = w.image();
  bad_magic[0] = 'X';
  EXPECT_THROW(Reader{bad_magic}, BadMagic);

  auto bad_tag = w.image();
  bad_tag[4 + 4 + 1] = 9;
  EXPECT_THROW(Reader(bad_tag).next(), UnknownTypeTag);

  auto bad_version = w.image();
  bad_version[4 + 4 + 1 + 4] = 2;
  EXPECT_THROW(Reader(bad_version).next(), UnknownVersion);

  auto bad_len = w.image();
  bad_len[4 + 4 + 1 + 8 + 7] = 0x40;
  EXPECT_THROW(Reader(bad_len).next(), TruncatedRecord);

  auto bad_crc = w.image();
  bad_crc.back() ^= 1;
  EXPECT_THROW(Reader(bad_crc).next(), CrcMismatch);
}

TEST(Rio, TruncationMidPayload) {
  Writer w;
  w.write("nt", hbook::NTuple({{"a", hbook::ColumnType::string}}));
  w.write("h", hbook::Hist1D(10, 0, 1));
  auto image = w.image();
  const std::size_t first_record_end = 4 + (4 + 2 + 4 + 4 + 8 + 18 + 4);
  for (std::size_t cut = image.size() - 1; cut > first_record_end; cut -= 7) {
    Bytes part(image.begin(), image.begin() + static_cast<std::ptrdiff_t>(cut));
    Reader r(part);
    EXPECT_THROW(r.read_all(), TruncatedRecord) << "cut at " << cut;
  }
}

TEST(Rio, EmptyFileHasNoRecords) {
  Writer w;
  Reader r(w.image());
  EXPECT_FALSE(r.next().has_value());
}
