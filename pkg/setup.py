from setuptools import setup, find_packages

def readme():
    with open('README.md') as f:
        return f.read()

setup(name='daelab',
      version='0.1.0',
      description='Decoupled Autoencoders on a toy Gaussian mixture',
      long_description=readme(),
      long_description_content_type="text/markdown",
      classifiers=[
        'Development Status :: 3 - Alpha',
        'Programming Language :: Python :: 3.7',
        'Programming Language :: Python :: 3.8',
        'Topic :: Scientific/Engineering :: Artificial Intelligence',
        'Intended Audience :: Science/Research',
      ],
      python_requires='>=3.7',
      packages=find_packages(exclude=['tests']),
      install_requires=[
        'numpy>=1.20.1,<2',
        'scipy',
        'pandas<2',
        'xarray==0.18.0',
        'netcdf4',
        'scikit-learn',
        'statsmodels',
        'joblib',
        'tqdm',
        'jsonschema>=3.2',
      ],
      extras_require={
        'plot': ['holoviews', 'matplotlib'],
      },
      entry_points={
        'console_scripts': ['daelab = daelab.cli:main'],
      },
      setup_requires=["pytest-runner"],
      tests_require=["pytest", "holoviews", "matplotlib"],
      zip_safe=True,
      include_package_data=True
)
