DEFAULT_CONFIG = {
    # ------------------------
    # Documents
    # ------------------------
    "schema_version": "1",
    "default_ring": "Z",

    # ------------------------
    # Spectral sequences
    # ------------------------
    "default_pages": 3,  # r_max when the caller gives none
    "max_pages": 16,     # guard against runaway --pages values

    # ------------------------
    # Random generation
    # ------------------------
    "entry_bound": 3,            # |entries| of generated differentials and maps
    "default_random_size": 8,    # generators per object when --size is absent
    "max_random_size": 24,
    "degree_span": 4,            # generated degrees are 0..degree_span-1
    "filtration_length": 4,      # levels 0..filtration_length-1
    "pair_probability": 0.6,     # chance that a generator is paired by the differential
    "conjugation_density": 0.3,  # chance of each off-diagonal entry in a basis change
    "conjugation_attempts": 8,   # retries before falling back to the unconjugated object
    "coefficients": [1, -1, 1, -1, 2, -2, 3, -3],  # sampled pairing coefficients
    "minus_fraction": 0.5,       # share of Minus orbits in split Morse-Bott data

    # ------------------------
    # Fixed corpus
    # ------------------------
    "default_cpn_level": 2,
    "default_borel_level": 2,
    "default_sphere_dim": 2,

    # ------------------------
    # Output
    # ------------------------
    "table_width": 160,
}
