from setuptools import setup, find_packages

pkgs = find_packages('src')

setup_kwds = dict(
    name='gildrl',
    version="0.1.0",
    zip_safe=False,
    packages=pkgs,
    package_dir={'': 'src'},
    install_requires=['numpy', 'pandas', 'matplotlib', 'torch'],
    entry_points={'console_scripts': ['gildrl=gildrl.experiment.cli:main']},
    )

setup(**setup_kwds)
