#include <math.h>
#include <stdio.h>
#include <string.h>

#include "quasiwave.h"

#define CHECK(cond)                                                   \
    do {                                                              \
        if (!(cond)) {                                                \
            const char *msg = qw_last_error_message();                \
            fprintf(stderr, "%s:%d: %s (%s)\n", __FILE__, __LINE__,   \
                    #cond, msg ? msg : "no error");                   \
            return 1;                                                 \
        }                                                             \
    } while (0)

static const char *SCENARIO =
    "[model]\nkind = \"zabusky\"\na = 2.0\n"
    "[u0]\nkind = \"zero\"\n"
    "[u1]\nkind = \"bump\"\nmass = -4.0\nradius = 1.0\n"
    "[grid]\nn = 256\n"
    "[run]\nt_end = 3.0\n";

int main(void) {
    QwModel *model = NULL;
    double v = 0.0;
    CHECK(qw_model_zabusky(2.0, &model) == QW_STATUS_OK);
    CHECK(qw_model_eval(model, 0.5, &v) == QW_STATUS_OK && v == 1.5);
    CHECK(qw_model_eval(model, -3.0, &v) == QW_STATUS_DEGENERACY);
    CHECK(qw_last_error_message() != NULL);
    qw_model_free(model);

    QwConfig *bad = NULL;
    CHECK(qw_config_from_toml("[model]\nkind = 3\n", &bad) != QW_STATUS_OK);
    CHECK(bad == NULL);

    QwConfig *cfg = NULL;
    CHECK(qw_config_from_toml(SCENARIO, &cfg) == QW_STATUS_OK);
    QwReport *report = NULL;
    CHECK(qw_run(cfg, &report) == QW_STATUS_OK);

    QwClassification kind;
    double t_stop = NAN;
    CHECK(qw_report_classification(report, &kind, &t_stop) == QW_STATUS_OK);
    CHECK(kind == QW_CLASSIFICATION_DEGENERATE);
    CHECK(t_stop > 0.0 && t_stop <= 1.0);

    size_t n = 0;
    CHECK(qw_report_record_count(report, 0, &n) == QW_STATUS_OK && n > 1);
    QwRecord rec;
    CHECK(qw_report_record(report, 0, n - 1, &rec) == QW_STATUS_OK);
    CHECK(rec.t == t_stop);

    char *json = NULL;
    CHECK(qw_report_to_json(report, &json) == QW_STATUS_OK);
    CHECK(strstr(json, "\"DEGENERATE\"") != NULL);
    qw_string_free(json);

    qw_report_free(report);
    qw_config_free(cfg);
    printf("quasiwave %s: degenerate at t = %.4f\n", qw_version(), t_stop);
    return 0;
}
