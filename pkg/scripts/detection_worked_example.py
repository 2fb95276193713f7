"""Loss-model arithmetic for the quoted detection numbers.

A detected level of -5.2 dB at quantum efficiency 0.81, inverted through
V_det = eta V + (1 - eta), gives a source level near -8.6 dB. The quoted
corrected value of 6.4 dB does not follow from this beam-splitter model.
"""

from kerrpol.detection import from_db, infer_source, to_db

ETA = 0.81
for detected_db in (-5.2, -6.4):
    v_det = from_db(detected_db)
    v_src = infer_source(v_det, ETA)
    print(f"detected {detected_db:+.1f} dB -> V = {v_det:.4f}; source V = {v_src:.4f} = {to_db(v_src):+.2f} dB")

# efficiency that would map -6.4 dB at the source to -5.2 dB detected
v_src, v_det = from_db(-6.4), from_db(-5.2)
eta_needed = (1 - v_det) / (1 - v_src)
print(f"eta needed to relate -6.4 dB (source) to -5.2 dB (detected): {eta_needed:.3f}")
