/* Minimal C consumer: build the staticlib first, then
 *   cc demo.c -I../include -L../../../target/release -lcurved_wigner_ffi -lm -o demo
 */
#include <stdio.h>
#include "curved_wigner.h"

int main(void) {
    double angle = 0.0;
    if (cw_geodetic_precession(1.0, 6.0, 0, &angle) != CwStatus_Ok) {
        return 1;
    }
    printf("geodetic precession at R = 6M: %.10f rad per orbit\n", angle);

    double dv[4], accel[4], chi_up;
    if (cw_circular_corrections(1.0, 6.0, 1.0, 0.0, 0.0, 0.0, dv, accel, &chi_up) != CwStatus_Ok) {
        return 1;
    }
    printf("spin-up corrections: dv_phi = %.8f, a_r = %.8f, chi = %.8f\n",
           dv[3], accel[1], chi_up);

    CwScenario *sc = cw_scenario_new(
        "{\"scenario\": \"radial-epr\", \"parameters\": {\"M\": 1.0, \"r\": 10.0, \"epsilon\": 1e-3}}");
    if (!sc || cw_scenario_run(sc) != CwStatus_Ok) {
        return 1;
    }
    char *json = cw_scenario_result_json(sc);
    printf("scenario result: %.60s...\n", json);
    cw_string_free(json);
    cw_scenario_free(sc);
    return 0;
}
