#include "ibfsi.h"

#include "ibfsi/errors.hpp"
#include "ibfsi/harness.hpp"
#include "ibfsi/kernels.hpp"

#include <cstdio>
#include <cstring>
#include <string>

#define IBFSI_EXPORT __attribute__((visibility("default")))

namespace {

thread_local std::string g_last_error;

ibfsi_status to_status(const ibfsi::Error& e) {
    using ibfsi::ErrorCode;
    switch (e.code()) {
    case ErrorCode::InvalidArgument: return IBFSI_ERR_INVALID_ARGUMENT;
    case ErrorCode::Config: return IBFSI_ERR_CONFIG;
    case ErrorCode::StencilOverflow: return IBFSI_ERR_STENCIL_OVERFLOW;
    case ErrorCode::SolverFailure: return IBFSI_ERR_SOLVER_FAILURE;
    case ErrorCode::InvertedElement: return IBFSI_ERR_INVERTED_ELEMENT;
    case ErrorCode::Mesh: return IBFSI_ERR_MESH;
    case ErrorCode::Io: return IBFSI_ERR_IO;
    case ErrorCode::Internal: return IBFSI_ERR_INTERNAL;
    }
    return IBFSI_ERR_INTERNAL;
}

template <typename Fn> ibfsi_status guarded(Fn&& fn) {
    try {
        fn();
        return IBFSI_OK;
    } catch (const ibfsi::Error& e) {
        g_last_error = e.what();
        return to_status(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return IBFSI_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return IBFSI_ERR_INTERNAL;
    }
}

ibfsi::Kernel1D parse_1d(const char* kernel) {
    if (!kernel) throw ibfsi::InvalidArgumentError("kernel name is null");
    const ibfsi::DeltaKernel d = ibfsi::DeltaKernel::parse(kernel);
    if (d.composite)
        throw ibfsi::InvalidArgumentError(
            "composite kernels are 2D objects; evaluate their BS members instead");
    return d.normal;
}

} // namespace

struct ibfsi_config {
    ibfsi::BenchmarkConfig cfg;
};

struct ibfsi_result {
    ibfsi::RunResult res;
};

extern "C" {

IBFSI_EXPORT const char* ibfsi_status_name(ibfsi_status status) {
    switch (status) {
    case IBFSI_OK: return "ok";
    case IBFSI_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case IBFSI_ERR_CONFIG: return "config-error";
    case IBFSI_ERR_STENCIL_OVERFLOW: return "stencil-overflow";
    case IBFSI_ERR_SOLVER_FAILURE: return "solver-failure";
    case IBFSI_ERR_INVERTED_ELEMENT: return "inverted-element";
    case IBFSI_ERR_MESH: return "mesh-error";
    case IBFSI_ERR_IO: return "io-error";
    case IBFSI_ERR_INTERNAL: return "internal-error";
    }
    return "unknown";
}

IBFSI_EXPORT const char* ibfsi_last_error(void) { return g_last_error.c_str(); }

IBFSI_EXPORT const char* ibfsi_version(void) { return "1.0.0"; }

IBFSI_EXPORT ibfsi_status ibfsi_kernel_eval(const char* kernel, double r, double* value) {
    return guarded([&] {
        if (!value) throw ibfsi::InvalidArgumentError("value pointer is null");
        *value = parse_1d(kernel).eval(r);
    });
}

IBFSI_EXPORT ibfsi_status ibfsi_kernel_eval_deriv(const char* kernel, double r, double* value) {
    return guarded([&] {
        if (!value) throw ibfsi::InvalidArgumentError("value pointer is null");
        *value = parse_1d(kernel).deriv(r);
    });
}

IBFSI_EXPORT ibfsi_status ibfsi_kernel_points(const char* kernel, int* points) {
    return guarded([&] {
        if (!points) throw ibfsi::InvalidArgumentError("points pointer is null");
        if (!kernel) throw ibfsi::InvalidArgumentError("kernel name is null");
        *points = ibfsi::DeltaKernel::parse(kernel).max_points();
    });
}

IBFSI_EXPORT ibfsi_status ibfsi_kernel_names(char names[][8], int cap, int* count) {
    return guarded([&] {
        const auto& all = ibfsi::supported_kernel_names();
        if (count) *count = static_cast<int>(all.size());
        if (!names) return;
        for (int k = 0; k < cap && k < static_cast<int>(all.size()); ++k)
            std::snprintf(names[k], 8, "%s", all[k].c_str());
    });
}

IBFSI_EXPORT ibfsi_status ibfsi_config_load(const char* path, ibfsi_config** out) {
    return guarded([&] {
        if (!path || !out) throw ibfsi::InvalidArgumentError("null argument");
        *out = new ibfsi_config{ibfsi::BenchmarkConfig::from_file(path)};
    });
}

IBFSI_EXPORT ibfsi_status ibfsi_config_from_text(const char* json_text, ibfsi_config** out) {
    return guarded([&] {
        if (!json_text || !out) throw ibfsi::InvalidArgumentError("null argument");
        *out = new ibfsi_config{ibfsi::BenchmarkConfig::from_json_text(json_text)};
    });
}

IBFSI_EXPORT ibfsi_status ibfsi_config_set_string(ibfsi_config* cfg, const char* key,
                                                  const char* value) {
    return guarded([&] {
        if (!cfg || !key || !value) throw ibfsi::InvalidArgumentError("null argument");
        const std::string k = key;
        if (k == "kernel")
            cfg->cfg.kernel = value;
        else if (k == "out")
            cfg->cfg.out_dir = value;
        else
            throw ibfsi::InvalidArgumentError("unknown string option '" + k + "'");
        cfg->cfg.validate();
    });
}

IBFSI_EXPORT ibfsi_status ibfsi_config_set_number(ibfsi_config* cfg, const char* key,
                                                  double value) {
    return guarded([&] {
        if (!cfg || !key) throw ibfsi::InvalidArgumentError("null argument");
        const std::string k = key;
        if (k == "mfac")
            cfg->cfg.mfac = value;
        else if (k == "n")
            cfg->cfg.resolution = static_cast<int>(value);
        else if (k == "final_time")
            cfg->cfg.final_time = value;
        else if (k == "dt")
            cfg->cfg.dt = value;
        else if (k == "load_time")
            cfg->cfg.load_time = value;
        else if (k == "output_every")
            cfg->cfg.output_every = static_cast<int>(value);
        else
            throw ibfsi::InvalidArgumentError("unknown numeric option '" + k + "'");
        cfg->cfg.validate();
    });
}

IBFSI_EXPORT void ibfsi_config_free(ibfsi_config* cfg) { delete cfg; }

IBFSI_EXPORT ibfsi_status ibfsi_run(const ibfsi_config* cfg, ibfsi_result** out) {
    return guarded([&] {
        if (!cfg || !out) throw ibfsi::InvalidArgumentError("null argument");
        *out = new ibfsi_result{ibfsi::run(cfg->cfg)};
    });
}

IBFSI_EXPORT int ibfsi_result_rows(const ibfsi_result* res) {
    return res ? static_cast<int>(res->res.series.rows.size()) : 0;
}

IBFSI_EXPORT int ibfsi_result_cols(const ibfsi_result* res) {
    return res ? static_cast<int>(res->res.series.columns.size()) : 0;
}

IBFSI_EXPORT const char* ibfsi_result_column_name(const ibfsi_result* res, int col) {
    if (!res || col < 0 || col >= ibfsi_result_cols(res)) return "";
    return res->res.series.columns[col].c_str();
}

IBFSI_EXPORT double ibfsi_result_value(const ibfsi_result* res, int row, int col) {
    if (!res || row < 0 || row >= ibfsi_result_rows(res) || col < 0 ||
        col >= ibfsi_result_cols(res))
        return 0.0;
    return res->res.series.rows[row][col];
}

IBFSI_EXPORT int ibfsi_result_failed(const ibfsi_result* res) {
    return res && res->res.failed ? 1 : 0;
}

IBFSI_EXPORT const char* ibfsi_result_failure_reason(const ibfsi_result* res) {
    return res ? res->res.failure_reason.c_str() : "";
}

IBFSI_EXPORT ibfsi_status ibfsi_result_write_csv(const ibfsi_result* res, const char* path) {
    return guarded([&] {
        if (!res || !path) throw ibfsi::InvalidArgumentError("null argument");
        ibfsi::write_csv(res->res.series, path);
    });
}

IBFSI_EXPORT void ibfsi_result_free(ibfsi_result* res) { delete res; }

IBFSI_EXPORT ibfsi_status ibfsi_props_run(int verbose, int* failures) {
    return guarded([&] {
        const auto results = ibfsi::run_property_suite();
        int bad = 0;
        for (const auto& r : results) {
            if (!r.pass) ++bad;
            if (verbose)
                std::printf("[%s] %-28s worst %.3e  tol %.1e\n", r.pass ? "PASS" : "FAIL",
                            r.name.c_str(), r.worst, r.tol);
        }
        if (failures) *failures = bad;
    });
}

} // extern "C"
