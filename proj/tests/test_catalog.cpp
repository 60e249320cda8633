#include <gtest/gtest.h>

#include <set>

#include "symflow/catalog.hpp"
#include "symflow/errors.hpp"

using namespace symflow;

namespace {

// Every integer an entry pins, looked up in the reports of the identities it takes part in.
void check_expected(const CatalogEntry& e, const std::vector<IndexReport>& reports) {
  for (const auto& x : e.expected) {
    bool seen = false;
    for (const auto& r : reports) {
      if (r.lhs_name == x.name) {
        EXPECT_EQ(r.lhs, x.value) << e.id << " " << x.name;
        seen = true;
      }
      for (const auto& t : r.rhs)
        if (t.name == x.name) {
          EXPECT_EQ(t.value, x.value) << e.id << " " << x.name;
          seen = true;
        }
    }
    EXPECT_TRUE(seen) << e.id << " pins " << x.name << " but no report computes it";
  }
}

std::vector<IndexReport> run(const CatalogEntry& e) {
  std::vector<IndexReport> out;
  if (e.is_clinic()) {
    out.push_back(verify_theorem1(e.clinic()));
    if (e.find_expected("irel")) out.push_back(verify_corollaries(e.clinic()));
  } else {
    out.push_back(verify_theorem2(e.bounded()));
  }
  return out;
}

}  // namespace

TEST(Catalog, IdsAreUniqueAndAddressable) {
  auto entries = catalog();
  ASSERT_GE(entries.size(), 8u);
  std::set<std::string> ids;
  for (const auto& e : entries) {
    EXPECT_TRUE(ids.insert(e.id).second) << e.id;
    EXPECT_FALSE(e.oracle.empty()) << e.id;
    EXPECT_EQ(find_entry(e.id).id, e.id);
  }
  EXPECT_EQ(find_entry("random-bounded-17").id, "random-bounded-17");
  EXPECT_THROW(find_entry("no-such-system"), ConfigError);
  EXPECT_THROW(find_entry("random-bounded-x1"), ConfigError);
  EXPECT_THROW(find_entry("random-bounded-"), ConfigError);
}

TEST(Catalog, EntriesValidate) {
  for (const auto& e : catalog(3)) EXPECT_NO_THROW(validate_entry(e)) << e.id;
}

TEST(Catalog, KindAccessorsThrowOnWrongKind) {
  auto e = find_entry("harmonic-bounded");
  EXPECT_FALSE(e.is_clinic());
  EXPECT_THROW(e.clinic(), ConfigError);
  EXPECT_NO_THROW(e.bounded());
}

TEST(Catalog, RandomEntryIsDeterministic) {
  auto p = random_bounded_problem(5);
  auto q = random_bounded_problem(5);
  EXPECT_EQ(p.family.n, q.family.n);
  EXPECT_EQ(p.family.b(0.3, 0.7), q.family.b(0.3, 0.7));
  EXPECT_EQ(p.left(0.0).basis(), q.left(0.0).basis());
  EXPECT_NE(random_bounded_problem(6).family.b(0.3, 0.7).rows(), 0);
}

TEST(Catalog, ExpectedIntegersReproduce) {
  for (const auto& e : catalog()) {
    SCOPED_TRACE(e.id);
    auto reports = run(e);
    for (const auto& r : reports) EXPECT_TRUE(r.equal) << r.identity;
    check_expected(e, reports);
  }
}

TEST(Catalog, ExpectedIntegersSurviveDoubling) {
  for (const char* id : {"harmonic-bounded", "rotating-boundary"}) {
    auto e = find_entry(id);
    auto& p = std::get<BoundedProblem>(e.problem);
    p.opts.grid_n *= 2;
    check_expected(e, run(e));
  }
  auto e = find_entry("sech-homoclinic");
  auto& p = std::get<ClinicProblem>(e.problem);
  p.opts.horizon *= 2;
  p.opts.geo_horizon *= 2;
  p.opts.operator_horizon *= 2;
  p.opts.grid_n *= 2;
  auto reports = run(e);
  for (const auto& r : reports) EXPECT_TRUE(r.equal) << r.identity;
  check_expected(e, reports);
}
