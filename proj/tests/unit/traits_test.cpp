#include <gtest/gtest.h>

#include <random>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "support/fixtures.hpp"
#include "vera/traits/remote.hpp"
#include "vera/traits/trait_store.hpp"

namespace vera {
namespace {

const LocalTraitStore& fixture_store() {
  static const LocalTraitStore store(load_trait_fixture(testing::trait_fixture_path()));
  return store;
}

TEST(TraitFixture, Loads) { EXPECT_EQ(fixture_store().size(), 10u); }

TEST(TraitSearch, PikaQuery) {
  const auto hits = fixture_store().search_species("pika");
  ASSERT_EQ(hits.size(), 3u);
  EXPECT_EQ(hits[0].taxon_id, "ochotona-princeps");
  EXPECT_EQ(hits[0].scientific_name, "Ochotona princeps");
  EXPECT_EQ(hits[0].attribute_record_count, 138u);
  EXPECT_GE(hits[0].attribute_record_count, hits[1].attribute_record_count);
  EXPECT_GE(hits[1].attribute_record_count, hits[2].attribute_record_count);
}

TEST(TraitSearch, CaseInsensitiveAndScientific) {
  const auto hits = fixture_store().search_species("OVIS");
  ASSERT_EQ(hits.size(), 1u);
  EXPECT_EQ(hits[0].taxon_id, "ovis-aries");
  EXPECT_EQ(fixture_store().search_species("gray WOLF").front().taxon_id, "canis-lupus");
}

TEST(TraitSearch, ExactMatchFirst) {
  // "Sheep" is an exact common name of Ovis aries; nothing else should outrank it.
  const auto hits = fixture_store().search_species("sheep");
  ASSERT_FALSE(hits.empty());
  EXPECT_EQ(hits[0].taxon_id, "ovis-aries");
}

TEST(TraitSearch, NoHitsAndBlankQuery) {
  EXPECT_TRUE(fixture_store().search_species("unicorn").empty());
  EXPECT_THROW(fixture_store().search_species(""), InvalidQueryError);
  EXPECT_THROW(fixture_store().search_species("   "), InvalidQueryError);
}

TEST(TraitFetch, CanonicalUnits) {
  const AttributeBundle b = fixture_store().fetch_attributes("ochotona-princeps");
  EXPECT_EQ(b.taxon_id(), "ochotona-princeps");
  EXPECT_DOUBLE_EQ(*b.get(AttributeField::Lifespan), 84.0);  // 7 years
  EXPECT_DOUBLE_EQ(*b.get(AttributeField::BodyMass), 0.156);  // 156 g
  EXPECT_FALSE(b.has(AttributeField::RespiratoryRate));
  EXPECT_EQ(b.provenance(AttributeField::Lifespan), Provenance::Store);
  EXPECT_THROW(fixture_store().fetch_attributes("dodo"), NotFoundError);
}

TEST(Units, Normalize) {
  EXPECT_DOUBLE_EQ(normalize_unit(AttributeField::Lifespan, 2, "years"), 24.0);
  EXPECT_DOUBLE_EQ(normalize_unit(AttributeField::Lifespan, 5, "months"), 5.0);
  EXPECT_DOUBLE_EQ(normalize_unit(AttributeField::BodyMass, 250, "g"), 0.25);
  EXPECT_DOUBLE_EQ(normalize_unit(AttributeField::RespiratoryRate, 2e-6, "g/s"), 2e-9);
  EXPECT_DOUBLE_EQ(normalize_unit(AttributeField::AssimilationEfficiency, 0.4, "fraction"), 0.4);
  EXPECT_DOUBLE_EQ(normalize_unit(AttributeField::OffspringCount, 3, "count"), 3.0);
  EXPECT_THROW(normalize_unit(AttributeField::BodyMass, 1, "lb"), DecodeError);
  EXPECT_THROW(normalize_unit(AttributeField::Lifespan, 1, "kg"), DecodeError);
}

TEST(Defaults, FillsMissingFieldsWithProvenance) {
  AttributeBundle b("x");
  b.set(AttributeField::Lifespan, 48.0);
  const AttributeBundle full = fill_defaults(b);
  EXPECT_TRUE(full.complete());
  EXPECT_EQ(full.get(AttributeField::Lifespan), 48.0);
  EXPECT_EQ(full.provenance(AttributeField::Lifespan), Provenance::Store);
  EXPECT_EQ(full.get(AttributeField::BodyMass), kDefaultAttributes.values.body_mass);
  EXPECT_EQ(full.provenance(AttributeField::BodyMass), Provenance::Default);
}

TEST(Defaults, RespectsCrossFieldInvariants) {
  AttributeBundle b("tiny");
  b.set(AttributeField::Lifespan, 3.0);   // below the default maturity of 6
  b.set(AttributeField::BodyMass, 0.05);  // below the default carbon of 0.2
  const SpeciesAttributes a = resolve_attributes(b);
  EXPECT_LT(a.reproductive_maturity, a.lifespan);
  EXPECT_LE(a.carbon_biomass, a.body_mass);
  EXPECT_FALSE(check_maturity(a));
  EXPECT_FALSE(check_carbon_fraction(a));
}

TEST(Defaults, RejectsOutOfRangeStoredValue) {
  AttributeBundle b("bad");
  b.set(AttributeField::AssimilationEfficiency, 1.5);
  try {
    fill_defaults(b);
    FAIL() << "expected AttrRangeError";
  } catch (const AttrRangeError& e) {
    EXPECT_EQ(e.field(), "assimilation_efficiency");
  }
}

TEST(Defaults, IdempotentOnRandomBundles) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 0; n < 1000; ++n) {
    AttributeBundle b("r" + std::to_string(n));
    for (AttributeField f : kAllAttributeFields) {
      if (u(rng) < 0.5) continue;
      double v = 0.0;
      switch (f) {
        case AttributeField::AssimilationEfficiency: v = u(rng); break;
        case AttributeField::RespiratoryRate:
        case AttributeField::PhotosynthesisRate: v = u(rng) * 1e-8; break;
        case AttributeField::OffspringCount: v = u(rng) * 6; break;
        default: v = 0.01 + u(rng) * 100; break;
      }
      b.set(f, v);
    }
    AttributeBundle once;
    try {
      once = fill_defaults(b);
    } catch (const AttrRangeError&) {
      continue;  // random cross-field combination stored out of range
    }
    ASSERT_EQ(fill_defaults(once), once) << n;
  }
}

TEST(Bundle, ToAttributesRequiresCompleteness) {
  AttributeBundle b("x");
  EXPECT_THROW(b.to_attributes(), Error);
  EXPECT_EQ(b.present_count(), 0u);
}

TEST(FixtureParse, RejectsBadDocuments) {
  EXPECT_THROW(parse_trait_fixture("{}"), DecodeError);
  EXPECT_THROW(parse_trait_fixture(R"([{"taxon_id":"a","scientific_name":"A","common_names":[],
    "attributes":{"wingspan":{"value":1,"unit":"m"}}}])"),
               DecodeError);
  EXPECT_THROW(parse_trait_fixture(R"([{"taxon_id":"a","scientific_name":"A","common_names":[],
    "attributes":{"body_mass":{"value":1,"unit":"stone"}}}])"),
               DecodeError);
  EXPECT_THROW(parse_trait_fixture(R"([
    {"taxon_id":"a","scientific_name":"A","common_names":[],"attributes":{}},
    {"taxon_id":"a","scientific_name":"B","common_names":[],"attributes":{}}])"),
               Error);
  EXPECT_THROW(parse_trait_fixture(R"([{"taxon_id":"a","scientific_name":"A","common_names":[],
    "attributes":{"lifespan":{"value":-3,"unit":"months"}}}])"),
               Error);
}

TEST(FixtureParse, RecordCountDefaultsToAttributeCount) {
  const auto entries = parse_trait_fixture(R"([{"taxon_id":"a","scientific_name":"A",
    "common_names":["Ay"],"attributes":{"lifespan":{"value":3,"unit":"years"},
    "body_mass":{"value":2,"unit":"kg"}}}])");
  ASSERT_EQ(entries.size(), 1u);
  EXPECT_EQ(entries[0].record.attribute_record_count, 2u);
}

TEST(LocalStore, ReplaceSwapsSnapshot) {
  LocalTraitStore store;
  EXPECT_TRUE(store.search_species("pika").empty());
  store.replace(load_trait_fixture(testing::trait_fixture_path()));
  EXPECT_EQ(store.search_species("pika").size(), 3u);
}

TEST(WireFormat, BundleRoundTrip) {
  const AttributeBundle b = fixture_store().fetch_attributes("poa-pratensis");
  EXPECT_EQ(bundle_from_wire_json(bundle_to_wire_json(b)), b);
  const nlohmann::json j = bundle_to_json(fill_defaults(fixture_store().fetch_attributes("ovis-aries")));
  EXPECT_EQ(j["provenance"]["lifespan"], "store");
  EXPECT_EQ(j["provenance"]["body_mass"], "default");
  EXPECT_EQ(j["attributes"]["lifespan"], 120.0);
}

// The checked-in scenario documents are what the builders produce from the store.
TEST(Scenarios, FixturesMatchStoreBuiltModels) {
  EXPECT_EQ(testing::load_fixture("phase3_sheep_traits.json"), testing::build_phase3(fixture_store()));
  EXPECT_EQ(testing::load_fixture("phase4_wolf.json"), testing::build_phase4(fixture_store()));
}

// A local server speaking the remote protocol, backed by the fixture.
class RemoteFixture : public ::testing::Test {
 protected:
  void SetUp() override {
    mount_trait_protocol(server_, fixture_store());
    server_.Get("/broken/search", [](const httplib::Request&, httplib::Response& res) {
      res.status = 200;
      res.set_content("not json", "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    ASSERT_GT(port_, 0);
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  void TearDown() override {
    server_.stop();
    thread_.join();
  }
  std::string base() const { return "http://127.0.0.1:" + std::to_string(port_); }

  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

TEST_F(RemoteFixture, MatchesLocalStore) {
  RemoteTraitStore remote(base());
  EXPECT_EQ(remote.search_species("pika"), fixture_store().search_species("pika"));
  EXPECT_EQ(remote.fetch_attributes("ochotona-princeps"),
            fixture_store().fetch_attributes("ochotona-princeps"));
}

TEST_F(RemoteFixture, ErrorsMapToTypes) {
  RemoteTraitStore remote(base());
  EXPECT_THROW(remote.fetch_attributes("dodo"), NotFoundError);
  EXPECT_THROW(remote.search_species(""), InvalidQueryError);
  RemoteTraitStore broken(base() + "/broken");
  EXPECT_THROW(broken.search_species("pika"), TransportError);
}

TEST(Remote, UnreachableIsTransportError) {
  // Bind then release a port so nothing is listening on it.
  int port = 0;
  {
    httplib::Server s;
    port = s.bind_to_any_port("127.0.0.1");
  }
  RemoteTraitStore remote("http://127.0.0.1:" + std::to_string(port),
                          std::chrono::milliseconds(500));
  EXPECT_THROW(remote.search_species("pika"), TransportError);
}

}  // namespace
}  // namespace vera
