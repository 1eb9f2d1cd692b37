"""Dephasing-robust interference: the emitter line that refuses to shine.

Pure dephasing washes out the antiresonance of the transition rate, so one
might expect it to spoil the underlying interference as well.  It does not:
both decay channels acquire identical phase kicks, so their phase
*difference* is untouched.  What dephasing does do is open an extra emission
route at the cavity frequency.  At the detuning of the rate minimum the
destructive interference still cancels the emitter line almost completely,
and the total spectrum is dominated by the dephasing-enabled cavity peak.
"""

import numpy as np

from fanoqed import (SystemParams, transition_rate, total_spectrum,
                     spectrum_component, integrated_moments)

DS = 20.0
DETUNING = -3160.0  # omega21 - omega_c at the rate minimum for gamma_ph = 0

print(f"detuning {DETUNING:+.0f} ueV, eta = 1\n")
print(f"{'gamma_ph':>9} {'W/gamma':>10} {'S21(w21)':>11} {'Sc(w21)':>11} "
      f"{'SF(w21)':>11} {'Stot(w21)':>11} {'cancel':>9} {'peak at':>9}")

for gph in (0.0, 3.0, 30.0):
    p = SystemParams(eta=1.0, gamma_ph=gph).with_detuning(DETUNING)
    w = transition_rate(p)
    m = integrated_moments(p)
    s21 = spectrum_component(p, 0.0, DS, "21", m)
    s_c = spectrum_component(p, 0.0, DS, "c", m)
    s_f = spectrum_component(p, 0.0, DS, "F", m)
    tot = s21 + s_c + s_f
    comp = total_spectrum(p, ds=DS, moments=m)
    peak_nu = comp.nu[np.argmax(comp.s_total)]
    where = "emitter" if abs(peak_nu) < abs(peak_nu + DETUNING) else "cavity"
    print(f"{gph:9.1f} {w / p.gamma:10.3g} {s21:11.3e} {s_c:11.3e} "
          f"{s_f:11.3e} {tot:11.3e} {tot / (s21 + s_c):9.1e} {where:>9}")

print("""
Reading the table:
* gamma_ph = 0: the emitter line survives (the cancellation is between huge
  S_21 and S_c contributions, and what remains still sits at the emitter
  frequency);
* gamma_ph > 0: the rate minimum is washed out (W/gamma grows by orders of
  magnitude), yet S_F still cancels S_21 + S_c at the emitter line to a few
  parts in 1e5, and the total spectrum flips to the cavity resonance.
The cancellation column is the measure of interference quality; it stays
tiny from gamma_ph = 3 to 30 ueV, so what matters is the presence of
dephasing (it opens the cavity route), not its strength.
""")
