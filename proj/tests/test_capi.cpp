#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ibfsi.h"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>

TEST_CASE("kernel evaluation through the C surface") {
    double v = 0.0;
    REQUIRE(ibfsi_kernel_eval("IB4", 0.0, &v) == IBFSI_OK);
    CHECK(v == doctest::Approx(0.5).epsilon(1e-15));
    REQUIRE(ibfsi_kernel_eval("BS3", 1.0, &v) == IBFSI_OK);
    CHECK(v == doctest::Approx(0.125).epsilon(1e-14));
    REQUIRE(ibfsi_kernel_eval_deriv("BS3", 0.5, &v) == IBFSI_OK);
    CHECK(v == doctest::Approx(-1.0).epsilon(1e-14));

    int pts = 0;
    REQUIRE(ibfsi_kernel_points("CBS32", &pts) == IBFSI_OK);
    CHECK(pts == 3);

    CHECK(ibfsi_kernel_eval("IB9", 0.0, &v) == IBFSI_ERR_CONFIG);
    CHECK(std::strlen(ibfsi_last_error()) > 0);
    CHECK(ibfsi_kernel_eval("CBS32", 0.0, &v) == IBFSI_ERR_INVALID_ARGUMENT);
    CHECK(ibfsi_kernel_eval("IB4", 0.0, nullptr) == IBFSI_ERR_INVALID_ARGUMENT);
}

TEST_CASE("kernel name enumeration") {
    char names[32][8];
    int count = 0;
    REQUIRE(ibfsi_kernel_names(names, 32, &count) == IBFSI_OK);
    CHECK(count == 15);
    bool saw_cbs32 = false;
    for (int k = 0; k < count; ++k)
        if (std::strcmp(names[k], "CBS32") == 0) saw_cbs32 = true;
    CHECK(saw_cbs32);
}

TEST_CASE("config handling and error codes") {
    ibfsi_config* cfg = nullptr;
    CHECK(ibfsi_config_load("missing_file.json", &cfg) == IBFSI_ERR_IO);
    CHECK(ibfsi_config_from_text("{\"benchmark\":\"membrane\",\"oops\":1}", &cfg) ==
          IBFSI_ERR_CONFIG);

    REQUIRE(ibfsi_config_from_text("{\"benchmark\":\"membrane\"}", &cfg) == IBFSI_OK);
    CHECK(ibfsi_config_set_string(cfg, "kernel", "CBS99") == IBFSI_ERR_CONFIG);
    CHECK(ibfsi_config_set_string(cfg, "nonsense", "x") == IBFSI_ERR_INVALID_ARGUMENT);
    CHECK(ibfsi_config_set_string(cfg, "kernel", "BS2") == IBFSI_OK);
    CHECK(ibfsi_config_set_number(cfg, "mfac", 1.0) == IBFSI_OK);
    CHECK(ibfsi_config_set_number(cfg, "mfac", -2.0) == IBFSI_ERR_CONFIG);
    ibfsi_config_free(cfg);
}

TEST_CASE("a tiny run through the C surface") {
    ibfsi_config* cfg = nullptr;
    const char* text = R"({"benchmark":"membrane","kernel":"CBS32","mfac":1.0,"n":16,
                           "final_time":0.02,"membrane":{"tracers":200}})";
    REQUIRE(ibfsi_config_from_text(text, &cfg) == IBFSI_OK);

    ibfsi_result* res = nullptr;
    REQUIRE(ibfsi_run(cfg, &res) == IBFSI_OK);
    CHECK(ibfsi_result_failed(res) == 0);
    const int rows = ibfsi_result_rows(res);
    const int cols = ibfsi_result_cols(res);
    CHECK(rows >= 2);
    REQUIRE(cols >= 2);
    CHECK(std::string(ibfsi_result_column_name(res, 0)) == "t");
    CHECK(ibfsi_result_value(res, rows - 1, 0) == doctest::Approx(0.02).epsilon(1e-9));

    const char* csv_path = "capi_series.csv";
    REQUIRE(ibfsi_result_write_csv(res, csv_path) == IBFSI_OK);
    std::ifstream in(csv_path);
    std::string header;
    std::getline(in, header);
    CHECK(header.rfind("t,", 0) == 0);
    in.close();
    std::remove(csv_path);

    ibfsi_result_free(res);
    ibfsi_config_free(cfg);
}

TEST_CASE("status names") {
    CHECK(std::string(ibfsi_status_name(IBFSI_OK)) == "ok");
    CHECK(std::string(ibfsi_status_name(IBFSI_ERR_SOLVER_FAILURE)) == "solver-failure");
    CHECK(std::strlen(ibfsi_version()) > 0);
}
