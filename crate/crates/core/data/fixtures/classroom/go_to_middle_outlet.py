def execute_command(image):
    image_patch = ImagePatch(image)
    outlet_patches = image_patch.find('outlet')
    if len(outlet_patches) == 0:
        return {'function': 'None', 'error': 'No outlet found.'}
    outlet_patches.sort(key=lambda x: x.horizontal_center)
    middle_outlet = outlet_patches[len(outlet_patches) // 2]
    return {'function': 'navigate_to_object', 'inputs': (middle_outlet.horizontal_center, middle_outlet.vertical_center), 'box': [middle_outlet.left, middle_outlet.lower, middle_outlet.right, middle_outlet.upper]}
