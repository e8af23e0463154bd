#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <string>

#include <couponflux/errors.hpp>
#include <couponflux/logspace.hpp>
#include <couponflux/record.hpp>

using namespace couponflux;

namespace {

struct EpochGuard {
    // pins SOURCE_DATE_EPOCH for one test and restores the environment after
    std::string saved;
    bool had = false;
    explicit EpochGuard(const char* value) {
        const char* old = std::getenv("SOURCE_DATE_EPOCH");
        if (old) {
            had = true;
            saved = old;
        }
        setenv("SOURCE_DATE_EPOCH", value, 1);
    }
    ~EpochGuard() {
        if (had)
            setenv("SOURCE_DATE_EPOCH", saved.c_str(), 1);
        else
            unsetenv("SOURCE_DATE_EPOCH");
    }
};

ExperimentRecord sample_record() {
    ExperimentRecord r;
    r.model = "clumsy";
    r.params = {{"n", 4.0}, {"p", 0.5}};
    r.seed = 99;
    r.outputs = {{"log_mu", std::log(0.03125)}, {"mu", 0.03125}};
    return r;
}

}  // namespace

TEST_CASE("timestamps honor SOURCE_DATE_EPOCH") {
    {
        EpochGuard g("0");
        CHECK(utc_timestamp() == "1970-01-01T00:00:00Z");
    }
    {
        EpochGuard g("1755856800");
        CHECK(utc_timestamp() == "2025-08-22T10:00:00Z");
    }
    // without the pin the stamp still has the fixed shape
    unsetenv("SOURCE_DATE_EPOCH");
    std::string now = utc_timestamp();
    REQUIRE(now.size() == 20);
    CHECK(now[4] == '-');
    CHECK(now[10] == 'T');
    CHECK(now.back() == 'Z');
}

TEST_CASE("json encoding keeps a stable key order") {
    EpochGuard g("0");
    ExperimentRecord r = sample_record();
    r.timestamp = utc_timestamp();
    std::string s = to_json(r).dump();
    CHECK(s.rfind("{\"schema_version\":1,\"model\":\"clumsy\",\"params\":", 0) == 0);
    // params themselves are alphabetical
    CHECK(s.find("\"params\":{\"n\":4.0,\"p\":0.5}") != std::string::npos);
    CHECK(s.find("\"seed\":99") != std::string::npos);
}

TEST_CASE("negative infinity is tagged, not serialized as null") {
    ExperimentRecord r = sample_record();
    r.outputs["log_tail"] = kNegInf;
    ordered_json j = to_json(r);
    CHECK(j["outputs"]["log_tail"] == "-inf");
    // round trip restores the value
    ExperimentRecord back = record_from_json(j);
    CHECK(back.outputs.at("log_tail") == kNegInf);
    CHECK(back.outputs.at("mu") == 0.03125);
    CHECK(back.model == "clumsy");
    CHECK(back.seed == 99);
}

TEST_CASE("non-finite values other than -inf are rejected") {
    CHECK_THROWS_AS(encode_output_value(std::numeric_limits<double>::quiet_NaN()), DomainError);
    CHECK_THROWS_AS(encode_output_value(std::numeric_limits<double>::infinity()), DomainError);
    CHECK(encode_output_value(kNegInf) == "-inf");
    CHECK(encode_output_value(2.5) == 2.5);
}

TEST_CASE("decode rejects junk") {
    CHECK(decode_output_value(ordered_json("-inf")) == kNegInf);
    CHECK(decode_output_value(ordered_json(1.25)) == 1.25);
    CHECK_THROWS_AS(decode_output_value(ordered_json("+inf")), DomainError);
    CHECK_THROWS_AS(decode_output_value(ordered_json(nullptr)), DomainError);
}

TEST_CASE("schema version is enforced") {
    ExperimentRecord r = sample_record();
    ordered_json j = to_json(r);
    j["schema_version"] = 2;
    CHECK_THROWS_AS(record_from_json(j), DomainError);
}

TEST_CASE("csv has a header line and a matching value line") {
    EpochGuard g("0");
    ExperimentRecord r = sample_record();
    r.timestamp = utc_timestamp();
    r.outputs["log_tail"] = kNegInf;
    std::string csv = to_csv(r);
    auto nl = csv.find('\n');
    REQUIRE(nl != std::string::npos);
    std::string header = csv.substr(0, nl);
    std::string values = csv.substr(nl + 1);
    CHECK(header.rfind("schema_version,model,", 0) == 0);
    CHECK(header.find("params.n") != std::string::npos);
    CHECK(header.find("params.p") != std::string::npos);
    CHECK(header.find("outputs.log_tail") != std::string::npos);
    CHECK(values.find("-inf") != std::string::npos);
    CHECK(values.find("clumsy") != std::string::npos);
    // column counts line up
    auto commas = [](const std::string& s) {
        std::size_t c = 0;
        for (char ch : s)
            if (ch == ',') ++c;
        return c;
    };
    CHECK(commas(header) == commas(values));
    // doubles are printed round-trippably
    ExperimentRecord r2 = sample_record();
    r2.params["p"] = 0.1;
    std::string csv2 = to_csv(r2);
    CHECK(csv2.find("0.1000000000000000") != std::string::npos);
}

TEST_CASE("error field survives the round trip") {
    ExperimentRecord r = sample_record();
    r.outputs.clear();
    r.error = "DomainError";
    ordered_json j = to_json(r);
    CHECK(j.contains("error"));
    ExperimentRecord back = record_from_json(j);
    CHECK(back.error == "DomainError");
    CHECK(back.outputs.empty());
}
