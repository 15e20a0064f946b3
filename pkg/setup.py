import setuptools

"""
To distribute:
=============
rm dist/*; python setup.py sdist bdist_wheel; python -m twine upload dist/*

"""


setuptools.setup(
    name="pysteklov",
    version="1.0.0",
    description="Steklov eigenfunctions on planar domains: DtN spectra, harmonic extensions, "
                "FBI transforms and exponential decay fits",
    long_description=open('README.md').read(),
    long_description_content_type='text/markdown',
    license='MIT',
    keywords='steklov dirichlet-to-neumann layer potentials FBI transform semiclassical',
    packages=setuptools.find_packages(),
    install_requires=['matplotlib>=3', 'numpy', 'scipy>=1.6'],
    python_requires='>=3.7',
    package_data={
        'pysteklov': ['configs/*.cfg'],
    },
    entry_points={
        'console_scripts': ['pysteklov=pysteklov.__main__:main'],
    },
    classifiers=[
        'Development Status :: 4 - Beta',
        'Intended Audience :: Science/Research',
        'Intended Audience :: Education',
        'Topic :: Scientific/Engineering :: Mathematics',
        'Topic :: Scientific/Engineering :: Physics',
        'Topic :: Education',

        'License :: OSI Approved :: MIT License',

        'Programming Language :: Python',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.7',
        'Programming Language :: Python :: 3.8',

        'Operating System :: OS Independent'
    ],
)
