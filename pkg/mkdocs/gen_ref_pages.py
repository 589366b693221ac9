"""Generate one reference page per public jacobilab module."""

import logging
from pathlib import Path, PurePosixPath

import mkdocs_gen_files
from mkdocs_gen_files.nav import Nav as MkdocsNav

logger = logging.getLogger(__name__)

# Modules with nothing for the reference
SKIPPED = {"__main__", "_version", "_validators"}


def _module_parts(path: Path, package_dir: Path) -> tuple[str, ...] | None:
    parts = path.relative_to(package_dir).with_suffix("").parts
    if parts[-1] in SKIPPED:
        return None
    if parts[-1] == "__init__":
        parts = parts[:-1]
    return (package_dir.name, *parts)


def gen_ref_pages(package_dir: Path, output_dir: str = "ref") -> int:
    """Write a `::: module` stub for each module and a literate nav file.

    :param package_dir: Directory of the package to document
    :type package_dir: Path
    :param output_dir: Docs-relative directory of the pages, defaults to "ref"
    :type output_dir: str, optional
    :raises ValueError: If the package holds no modules
    :return: Number of pages written
    :rtype: int
    """
    package_dir = package_dir.resolve()
    modules = sorted(package_dir.rglob("*.py"))
    if not modules:
        raise ValueError(f"no Python modules found under {package_dir}")

    nav = MkdocsNav()
    written = 0
    for path in modules:
        parts = _module_parts(path, package_dir)
        if parts is None:
            logger.debug("skip %s", path)
            continue

        if path.stem == "__init__":
            page = PurePosixPath(*parts[1:], "index.md")
        else:
            page = PurePosixPath(*parts[1:]).with_suffix(".md")
        nav[parts] = page.as_posix()
        with mkdocs_gen_files.open(f"{output_dir}/{page}", "w") as fd:
            print("::: " + ".".join(parts), file=fd)
        mkdocs_gen_files.set_edit_path(f"{output_dir}/{page}", path.relative_to(package_dir.parent))
        written += 1

    with mkdocs_gen_files.open(f"{output_dir}/NAV_REF.md", "w") as nav_file:
        nav_file.writelines(nav.build_literate_nav())
    return written


gen_ref_pages(Path(__file__).parent.parent / "jacobilab")
