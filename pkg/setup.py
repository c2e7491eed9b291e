"""Package installer."""
from setuptools import find_packages, setup

LONG_DESCRIPTION = '''
TopoMan discovers the topology of middlebox networks that include SDN islands. Middlebox
agents forward and report lightweight text probes; the MB Controller selects probe pairs,
turns the reports into interface-to-interface links and finishes edge links from data
traffic seen by the SDN controller. Probes can hide their identity behind tokens and seal
their payloads to the controller, and configured service paths can be checked end to end
with path-checker probes.

The package ships a deterministic discrete-event simulator, generators for the evaluation
topology families and a command line (`topoman`) that reproduces the metric tables.
'''
VERSION = '1.0.0'
NAME = 'TopoMan'

setup(
    name=NAME,
    version=VERSION,
    description='Probe-based topology discovery for middlebox networks with SDN islands.',
    long_description=LONG_DESCRIPTION,
    long_description_content_type="text/markdown",
    license='GPLv3',
    install_requires=[
        'pandas',
        'networkx',
        'simpy',
        'cryptography>=41',
        'docflow @ git+https://github.com/Jiarui0923/DocFlow@1.0.0'
    ],
    extras_require={
        'test': ['pytest', 'hypothesis'],
    },
    entry_points={
        'console_scripts': ['topoman=topoman.cli:main'],
    },
    classifiers=[
        'Intended Audience :: Developers',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: GPLv3 License',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.12',
        'Topic :: System :: Networking',
    ],
    packages=find_packages('.', exclude=['tests', 'tests.*']),
    platforms=["any"],
    zip_safe=True,
)
