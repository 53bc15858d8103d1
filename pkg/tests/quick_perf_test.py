"""Quick acceptance and timing run over the random corpora"""
import time

from gysin.cones import connecting_mismatches, grid_lemma57
from gysin.factory import random_chain_map, random_filtered, random_ses_morphism, random_two_line
from gysin.rings import QQ, ZZ
from gysin.spectra import check_cone_equals_gysin, convergence_check, page_recursion_check, spectral_pages


def _pages_ok(seed: int) -> bool:
    sp = spectral_pages(random_filtered(seed, 10), 4)
    return not page_recursion_check(sp) and not convergence_check(sp)


def _cone_is_gysin(ring):
    return lambda seed: check_cone_equals_gysin(random_two_line(seed, 10, ring), raise_on_mismatch=False).ok


CORPORA = {
    "connecting map = f_*": (lambda seed: not connecting_mismatches(random_chain_map(seed, 12)), 200),
    "grid square pattern": (lambda seed: grid_lemma57(random_ses_morphism(seed, 9)).ok, 50),
    "page recursion and convergence": (_pages_ok, 100),
    "cone = Gysin over Z": (_cone_is_gysin(ZZ), 100),
    "cone = Gysin over Q": (_cone_is_gysin(QQ), 100),
}


def main() -> bool:
    print('🚀 QUICK ACCEPTANCE RUN')
    print('=' * 40)
    all_passed = True
    for name, (check, count) in CORPORA.items():
        start = time.perf_counter()
        failed = [seed for seed in range(count) if not check(seed)]
        elapsed = time.perf_counter() - start
        passed = not failed
        all_passed = all_passed and passed
        details = f"{count - len(failed)}/{count} seeds in {elapsed:.2f}s"
        if failed:
            details += f", first failing seed {failed[0]}"
        print(f'{name}: {"✅ PASS" if passed else "❌ FAIL"} - {details}')
    return all_passed


if __name__ == "__main__":
    raise SystemExit(0 if main() else 1)
