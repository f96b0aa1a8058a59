def execute_command(image):
    image_patch = ImagePatch(image)
    rack_patches = image_patch.find('bike rack')
    if len(rack_patches) == 0:
        return {'function': 'None', 'error': 'No bike rack found.'}
    rack = rack_patches[0]
    return {'function': 'navigate_to_object', 'inputs': (rack.horizontal_center, rack.vertical_center), 'box': [rack.left, rack.lower, rack.right, rack.upper]}
