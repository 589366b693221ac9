from mkdocs.config.defaults import MkDocsConfig  # pyright: ignore[reportMissingImports]

import jacobilab


def on_config(config: MkDocsConfig):
    config.site_name = f"{jacobilab.__title__} {jacobilab.__version__}"
    config.site_author = jacobilab.__author__
    config.copyright = f"Copyright &copy; {jacobilab.__copyright__}, {jacobilab.__license__}"

    return config
