"""Generate the qottkit reference pages and navigation."""

import ast
from pathlib import Path

import mkdocs_gen_files

PACKAGE = "qottkit"

# Navigation section of each public module; anything unlisted goes to "Other".
SECTIONS = {
    "qudits": "Qudit core",
    "gates": "Qudit core",
    "measures": "Qudit core",
    "channels": "Qudit core",
    "containers": "Qudit core",
    "maskers": "Maskers",
    "qott": "Commitment",
    "protocol": "Commitment",
    "baseline": "Commitment",
    "simulator": "Simulator",
    "exports": "Fixtures",
    "imports": "Fixtures",
    "reports": "Reports and CLI",
    "cli": "Reports and CLI",
}

nav = mkdocs_gen_files.Nav()
nav["Home"] = "index.md"

root = Path(__file__).parent.parent
src = root / PACKAGE


def directive(target: str, members: list[str] | None) -> str:
    """Render one mkdocstrings block; `None` documents every member."""
    lines = [f"::: {target}", "    options:"]
    if members is None:
        lines.append("        members: yes")
    elif not members:
        lines.append("        members: []")
    else:
        lines.append("        members:")
        lines.extend(f"            - {name}" for name in members)
    return "\n".join(lines) + "\n"


def public_names(tree: ast.Module) -> list[tuple[str, list[str] | None]]:
    """Top-level public classes (with public methods), functions and constants."""
    found: list[tuple[str, list[str] | None]] = []
    for node in tree.body:
        if isinstance(node, ast.ClassDef) and not node.name.startswith("_"):
            methods = [
                child.name
                for child in node.body
                if isinstance(child, (ast.FunctionDef, ast.ClassDef))
                and not child.name.startswith("_")
            ]
            found.append((node.name, methods))
        elif isinstance(node, ast.FunctionDef) and not node.name.startswith("_"):
            found.append((node.name, None))
        elif isinstance(node, ast.AnnAssign) and isinstance(node.target, ast.Name):
            if node.target.id.isupper():
                found.append((node.target.id, None))
        elif isinstance(node, ast.Assign):
            found.extend(
                (target.id, None)
                for target in node.targets
                if isinstance(target, ast.Name) and target.id.isupper()
            )
    return found


for path in sorted(src.glob("*.py")):
    name = path.stem
    if name.startswith("_"):
        continue

    doc_path = Path("docs", f"{name}.md")
    nav[(SECTIONS.get(name, "Other"), name.title())] = doc_path.as_posix()

    tree = ast.parse(path.read_text(encoding="utf-8"))
    with mkdocs_gen_files.open(doc_path, "w") as page:
        page.write(f"# {PACKAGE}.{name}\n\n")
        page.write(directive(f"{PACKAGE}.{name}", []))
        for member, members in public_names(tree):
            page.write(directive(f"{PACKAGE}.{name}.{member}", members))

    mkdocs_gen_files.set_edit_path(doc_path, path.relative_to(root))

with mkdocs_gen_files.open("SUMMARY.md", "w") as nav_file:
    nav_file.writelines(nav.build_literate_nav())
