"""Shared record of acceptance outcomes, printed at the end of the run."""

# criterion number -> list of (passed, detail)
OUTCOMES: dict = {}
TITLES: dict = {}


def record(number: int, title: str, passed: bool, detail: str) -> None:
    TITLES[number] = title
    OUTCOMES.setdefault(number, []).append((passed, detail))
    print(f"criterion {number} {'PASS' if passed else 'FAIL'}: {title}: {detail}")


def summary_lines() -> list:
    lines = []
    for number in sorted(OUTCOMES):
        results = OUTCOMES[number]
        ok = all(p for p, _ in results)
        if len(results) <= 3:
            detail = " | ".join(d for _, d in results)
        else:
            bad = [d for p, d in results if not p]
            detail = f"{len(results) - len(bad)}/{len(results)} cases pass"
            if bad:
                shown = "; ".join(bad[:8]) + ("; ..." if len(bad) > 8 else "")
                detail += f"; failing: {shown}"
        lines.append(f"criterion {number} {'PASS' if ok else 'FAIL'}  {TITLES[number]}: {detail}")
    return lines
