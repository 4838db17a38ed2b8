#include <stdio.h>
#include <string.h>
#include "alciota.h"

static int check(AlciotaStatus s, const char *what) {
    if (s != ALCIOTA_STATUS_OK) {
        const char *msg = alciota_last_error();
        fprintf(stderr, "%s failed: %d %s\n", what, (int)s, msg ? msg : "");
        return 1;
    }
    return 0;
}

int main(void) {
    AlciotaConcept *c = NULL;
    AlciotaResult *r = NULL;
    AlciotaVerdict v;
    char *text = NULL;

    if (check(alciota_concept_parse("(and (the A) (some r B))", &c), "parse")) return 1;
    if (check(alciota_prove(c, NULL, ALCIOTA_LOGIC_ALCI, true, 0, &r), "prove")) return 1;
    if (check(alciota_result_verdict(r, &v), "verdict")) return 1;
    if (v != ALCIOTA_VERDICT_SAT) return 2;

    AlciotaModel *m = NULL;
    if (check(alciota_result_model(r, &m), "model")) return 1;
    if (check(alciota_model_eval(m, c, &text), "eval")) return 1;
    char *root = NULL;
    if (check(alciota_result_root(r, &root), "root")) return 1;
    if (strcmp(text, root) != 0) return 3;
    printf("sat root=%s\n", root);
    alciota_string_free(root);
    alciota_string_free(text);
    alciota_model_free(m);
    alciota_result_free(r);
    alciota_concept_free(c);

    if (alciota_concept_parse("(and A", &c) != ALCIOTA_STATUS_PARSE) return 4;
    if (alciota_last_error() == NULL) return 5;
    return 0;
}
