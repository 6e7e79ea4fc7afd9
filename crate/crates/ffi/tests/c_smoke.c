#include "baire.h"
#include <stdio.h>
#include <string.h>

int main(void) {
    BaireSeq *a = NULL;
    BaireASet *set = NULL;
    char *s = NULL;
    if (baire_seq_from_json("{\"prefix\": [], \"period\": [0]}", &a) != BAIRE_STATUS_OK) return 1;
    if (baire_aset_new(a, &set) != BAIRE_STATUS_OK) return 2;
    if (baire_aset_element(set, 4, &s) != BAIRE_STATUS_OK) return 3;
    int ok = strcmp(s, "46059") == 0;
    baire_string_free(s);
    if (!ok) return 4;
    if (baire_seq_from_json("not json", &a) != BAIRE_STATUS_INVALID_INPUT) return 5;
    if (strlen(baire_last_error()) == 0) return 6;
    baire_aset_free(set);
    baire_seq_free(a);
    puts("ok");
    return 0;
}
